#pragma once

#include <span>
#include <stdexcept>

#include "hri/fuzzy/membership.hpp"

namespace hri::fuzzy {

struct TypeReducedInterval {
  double y_l = 0.0;
  double y_r = 0.0;
};

/// One rule (or merged consequent) entering center-of-sets reduction.
struct WeightedCentroid {
  FiringInterval firing;
  FiringInterval centroid;  // [left, right] centroid of the consequent set
};

struct KarnikMendelTrace {
  int left_iterations = 0;
  int right_iterations = 0;
};

class NoRuleFiredError : public std::runtime_error {
 public:
  NoRuleFiredError() : std::runtime_error("no rule fired") {}
};

/// Karnik-Mendel center-of-sets type reduction. Entries whose upper
/// firing is zero are ignored; if none remain, throws NoRuleFiredError.
TypeReducedInterval center_of_sets(std::span<const WeightedCentroid> firings,
                                   KarnikMendelTrace* trace = nullptr);

double defuzzify(const TypeReducedInterval& interval);

}  // namespace hri::fuzzy
