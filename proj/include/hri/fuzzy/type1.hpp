#pragma once

#include "hri/fuzzy/system.hpp"

namespace hri::fuzzy {

/// Type-1 Mamdani evaluation of the same rule base using only each term's
/// principal Gaussian (spread ignored): min t-norm, max merge of shared
/// consequents, weighted mean of consequent centers.
Outputs evaluate_type1(const Inputs& inputs, const IT2FuzzySystem& system);

}  // namespace hri::fuzzy
