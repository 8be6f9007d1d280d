#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hri/fuzzy/membership.hpp"
#include "hri/fuzzy/type_reduction.hpp"

namespace hri::fuzzy {

/// The eleven linguistic labels every variable carries, most negative first.
inline constexpr std::array<std::string_view, 11> kTermLabels = {
    "NegativeVeryLarge", "NegativeLarge",     "NegativeMedium", "NegativeSmall",
    "NegativeVerySmall", "Zero",              "PositiveVerySmall", "PositiveSmall",
    "PositiveMedium",    "PositiveLarge",     "PositiveVeryLarge"};

struct Term {
  std::string label;
  IT2GaussianMF mf;
};

class LinguisticVariable {
 public:
  /// Throws std::invalid_argument unless the terms are exactly kTermLabels
  /// in order, with strictly increasing centers mirrored about zero.
  LinguisticVariable(std::string name, Universe universe, std::vector<Term> terms);

  /// Evenly spaced centers over the universe, sigma = half the spacing.
  static LinguisticVariable standard(std::string name, Universe universe = {},
                                     double spread = 2.0);

  const std::string& name() const { return name_; }
  const Universe& universe() const { return universe_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Throws std::out_of_range naming the label if absent.
  const Term& term(std::string_view label) const;
  bool has_term(std::string_view label) const;

 private:
  std::string name_;
  Universe universe_;
  std::vector<Term> terms_;
};

struct Clause {
  std::string variable;
  std::string term;

  bool operator==(const Clause&) const = default;
};

struct Rule {
  std::vector<Clause> antecedents;
  Clause consequent;
};

enum class TNorm { Minimum };
enum class SNorm { Maximum };

struct RuleFiring {
  const Rule* rule = nullptr;
  FiringInterval interval;
};

class MissingInputError : public std::invalid_argument {
 public:
  explicit MissingInputError(const std::string& variable)
      : std::invalid_argument("missing input variable '" + variable + "'"),
        variable_(variable) {}
  const std::string& variable() const { return variable_; }

 private:
  std::string variable_;
};

using Inputs = std::map<std::string, double, std::less<>>;
using Outputs = std::map<std::string, double, std::less<>>;

/// Immutable interval type-2 Mamdani system. Rules combine antecedents
/// with the t-norm; rules sharing a consequent set are merged with the
/// s-norm before center-of-sets reduction.
class IT2FuzzySystem {
 public:
  IT2FuzzySystem(std::vector<LinguisticVariable> inputs,
                 std::vector<LinguisticVariable> outputs, std::vector<Rule> rules,
                 TNorm tnorm = TNorm::Minimum, SNorm snorm = SNorm::Maximum);

  /// Single input `error` → single output `correction`, each term mapped
  /// to its mirror so a negative error yields a positive correction.
  static IT2FuzzySystem default_axis_controller(double spread = 2.0);

  const std::vector<LinguisticVariable>& inputs() const { return inputs_; }
  const std::vector<LinguisticVariable>& outputs() const { return outputs_; }
  const std::vector<Rule>& rules() const { return rules_; }
  TNorm tnorm() const { return tnorm_; }
  SNorm snorm() const { return snorm_; }

  const LinguisticVariable& input(std::string_view name) const;
  const LinguisticVariable& output(std::string_view name) const;

  /// Copy of this system with every term's spread replaced.
  IT2FuzzySystem with_spread(double spread) const;

 private:
  void validate() const;

  std::vector<LinguisticVariable> inputs_;
  std::vector<LinguisticVariable> outputs_;
  std::vector<Rule> rules_;
  TNorm tnorm_;
  SNorm snorm_;
};

/// Inputs are clamped to their universes before fuzzification.
std::vector<RuleFiring> fire_rules(const Inputs& inputs, const IT2FuzzySystem& system);

/// Per output variable: merged consequents paired with their centroids,
/// clipped to the output universe.
std::map<std::string, std::vector<WeightedCentroid>, std::less<>> consequent_sets(
    const std::vector<RuleFiring>& firings, const IT2FuzzySystem& system);

std::map<std::string, TypeReducedInterval, std::less<>> type_reduce(
    const Inputs& inputs, const IT2FuzzySystem& system);

Outputs evaluate(const Inputs& inputs, const IT2FuzzySystem& system);

/// Convenience for single-input single-output systems.
double evaluate_scalar(double x, const IT2FuzzySystem& system);

}  // namespace hri::fuzzy
