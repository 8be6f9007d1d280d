#include "hri/fuzzy/system.hpp"

#include <algorithm>
#include <cmath>

namespace hri::fuzzy {

LinguisticVariable::LinguisticVariable(std::string name, Universe universe,
                                       std::vector<Term> terms)
    : name_(std::move(name)), universe_(universe), terms_(std::move(terms)) {
  universe_.validate();
  if (name_.empty()) throw std::invalid_argument("variable name must not be empty");
  if (terms_.size() != kTermLabels.size()) {
    throw std::invalid_argument("variable '" + name_ + "': expected " +
                                std::to_string(kTermLabels.size()) + " terms, got " +
                                std::to_string(terms_.size()));
  }
  const double scale = std::max(std::abs(universe_.lo), std::abs(universe_.hi));
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (t.label != kTermLabels[i]) {
      throw std::invalid_argument("variable '" + name_ + "': term " + std::to_string(i) +
                                  " must be " + std::string(kTermLabels[i]) + ", got " +
                                  t.label);
    }
    if (!(t.mf.sigma > 0.0)) {
      throw std::invalid_argument("variable '" + name_ + "': sigma of " + t.label +
                                  " must be positive");
    }
    if (!(t.mf.spread >= 0.0)) {
      throw std::invalid_argument("variable '" + name_ + "': spread of " + t.label +
                                  " must be nonnegative");
    }
    if (i > 0 && !(terms_[i - 1].mf.center < t.mf.center)) {
      throw std::invalid_argument("variable '" + name_ + "': centers must increase");
    }
    const auto& mirror = terms_[terms_.size() - 1 - i];
    if (std::abs(t.mf.center + mirror.mf.center) > 1e-9 * scale) {
      throw std::invalid_argument("variable '" + name_ + "': layout not symmetric about 0 at " +
                                  t.label);
    }
  }
}

LinguisticVariable LinguisticVariable::standard(std::string name, Universe universe,
                                                double spread) {
  universe.validate();
  if (universe.lo != -universe.hi) {
    throw std::invalid_argument("standard layout needs a universe symmetric about 0");
  }
  const double n = static_cast<double>(kTermLabels.size() - 1);
  const double spacing = (universe.hi - universe.lo) / n;
  std::vector<Term> terms;
  terms.reserve(kTermLabels.size());
  for (std::size_t i = 0; i < kTermLabels.size(); ++i) {
    // Mirror explicitly so the layout is exactly symmetric in floating point.
    const std::size_t j = kTermLabels.size() - 1 - i;
    const double c = i < j ? -(universe.hi - spacing * static_cast<double>(i))
                   : i == j ? 0.0
                            : universe.hi - spacing * static_cast<double>(j);
    terms.push_back({std::string(kTermLabels[i]), {c, spacing / 2.0, spread}});
  }
  return LinguisticVariable(std::move(name), universe, std::move(terms));
}

const Term& LinguisticVariable::term(std::string_view label) const {
  for (const auto& t : terms_) {
    if (t.label == label) return t;
  }
  throw std::out_of_range("variable '" + name_ + "' has no term '" + std::string(label) + "'");
}

bool LinguisticVariable::has_term(std::string_view label) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [&](const Term& t) { return t.label == label; });
}

IT2FuzzySystem::IT2FuzzySystem(std::vector<LinguisticVariable> inputs,
                               std::vector<LinguisticVariable> outputs,
                               std::vector<Rule> rules, TNorm tnorm, SNorm snorm)
    : inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      rules_(std::move(rules)),
      tnorm_(tnorm),
      snorm_(snorm) {
  validate();
}

namespace {

const LinguisticVariable* find_variable(const std::vector<LinguisticVariable>& vars,
                                        std::string_view name) {
  for (const auto& v : vars) {
    if (v.name() == name) return &v;
  }
  return nullptr;
}

}  // namespace

const LinguisticVariable& IT2FuzzySystem::input(std::string_view name) const {
  if (const auto* v = find_variable(inputs_, name)) return *v;
  throw std::out_of_range("no input variable '" + std::string(name) + "'");
}

const LinguisticVariable& IT2FuzzySystem::output(std::string_view name) const {
  if (const auto* v = find_variable(outputs_, name)) return *v;
  throw std::out_of_range("no output variable '" + std::string(name) + "'");
}

void IT2FuzzySystem::validate() const {
  if (inputs_.empty() || outputs_.empty()) {
    throw std::invalid_argument("system needs at least one input and one output");
  }
  if (rules_.empty()) throw std::invalid_argument("system needs at least one rule");
  std::vector<std::string> names;
  for (const auto& v : inputs_) names.push_back(v.name());
  for (const auto& v : outputs_) names.push_back(v.name());
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw std::invalid_argument("variable names must be unique");
  }

  for (std::size_t r = 0; r < rules_.size(); ++r) {
    const auto& rule = rules_[r];
    const std::string where = "rule " + std::to_string(r) + ": ";
    if (rule.antecedents.empty()) throw std::invalid_argument(where + "no antecedents");
    for (const auto& a : rule.antecedents) {
      const auto* v = find_variable(inputs_, a.variable);
      if (!v) throw std::invalid_argument(where + "unknown input '" + a.variable + "'");
      if (!v->has_term(a.term)) {
        throw std::invalid_argument(where + "unknown term '" + a.term + "' of " + a.variable);
      }
    }
    const auto* out = find_variable(outputs_, rule.consequent.variable);
    if (!out) {
      throw std::invalid_argument(where + "unknown output '" + rule.consequent.variable + "'");
    }
    if (!out->has_term(rule.consequent.term)) {
      throw std::invalid_argument(where + "unknown term '" + rule.consequent.term + "' of " +
                                  rule.consequent.variable);
    }
  }

  // Coverage, checked one input at a time on the diagnostic grid: some rule
  // must keep a nonzero upper degree on that variable at every sample.
  for (const auto& v : inputs_) {
    for (double x : v.universe().grid()) {
      const bool covered = std::any_of(rules_.begin(), rules_.end(), [&](const Rule& rule) {
        return std::all_of(rule.antecedents.begin(), rule.antecedents.end(),
                           [&](const Clause& a) {
                             return a.variable != v.name() ||
                                    v.term(a.term).mf.degree(x).upper > 0.0;
                           });
      });
      if (!covered) {
        throw std::invalid_argument("no rule covers " + v.name() + " = " + std::to_string(x));
      }
    }
  }
}

IT2FuzzySystem IT2FuzzySystem::default_axis_controller(double spread) {
  auto error = LinguisticVariable::standard("error", Universe{}, spread);
  auto correction = LinguisticVariable::standard("correction", Universe{}, spread);
  std::vector<Rule> rules;
  for (std::size_t i = 0; i < kTermLabels.size(); ++i) {
    rules.push_back({{{"error", std::string(kTermLabels[i])}},
                     {"correction", std::string(kTermLabels[kTermLabels.size() - 1 - i])}});
  }
  return IT2FuzzySystem({std::move(error)}, {std::move(correction)}, std::move(rules));
}

IT2FuzzySystem IT2FuzzySystem::with_spread(double spread) const {
  auto respread = [spread](const std::vector<LinguisticVariable>& vars) {
    std::vector<LinguisticVariable> out;
    for (const auto& v : vars) {
      auto terms = v.terms();
      for (auto& t : terms) t.mf.spread = spread;
      out.emplace_back(v.name(), v.universe(), std::move(terms));
    }
    return out;
  };
  return IT2FuzzySystem(respread(inputs_), respread(outputs_), rules_, tnorm_, snorm_);
}

std::vector<RuleFiring> fire_rules(const Inputs& inputs, const IT2FuzzySystem& system) {
  std::vector<RuleFiring> out;
  out.reserve(system.rules().size());
  for (const auto& rule : system.rules()) {
    FiringInterval f{1.0, 1.0};
    for (const auto& a : rule.antecedents) {
      const auto it = inputs.find(a.variable);
      if (it == inputs.end()) throw MissingInputError(a.variable);
      const auto& var = system.input(a.variable);
      const auto d = var.term(a.term).mf.degree(var.universe().clamp(it->second));
      f.lower = std::min(f.lower, d.lower);
      f.upper = std::min(f.upper, d.upper);
    }
    out.push_back({&rule, f});
  }
  return out;
}

std::map<std::string, std::vector<WeightedCentroid>, std::less<>> consequent_sets(
    const std::vector<RuleFiring>& firings, const IT2FuzzySystem& system) {
  // (output, term) -> merged firing, in first-seen order.
  std::map<std::string, std::vector<std::pair<std::string, FiringInterval>>, std::less<>> merged;
  for (const auto& f : firings) {
    auto& terms = merged[f.rule->consequent.variable];
    auto it = std::find_if(terms.begin(), terms.end(),
                           [&](const auto& p) { return p.first == f.rule->consequent.term; });
    if (it == terms.end()) {
      terms.emplace_back(f.rule->consequent.term, f.interval);
    } else {
      it->second.lower = std::max(it->second.lower, f.interval.lower);
      it->second.upper = std::max(it->second.upper, f.interval.upper);
    }
  }

  std::map<std::string, std::vector<WeightedCentroid>, std::less<>> out;
  for (const auto& [name, terms] : merged) {
    const auto& var = system.output(name);
    auto& sets = out[name];
    for (const auto& [label, firing] : terms) {
      auto c = var.term(label).mf.centroid();
      c.lower = var.universe().clamp(c.lower);
      c.upper = var.universe().clamp(c.upper);
      sets.push_back({firing, c});
    }
  }
  return out;
}

std::map<std::string, TypeReducedInterval, std::less<>> type_reduce(
    const Inputs& inputs, const IT2FuzzySystem& system) {
  std::map<std::string, TypeReducedInterval, std::less<>> out;
  for (const auto& [name, sets] : consequent_sets(fire_rules(inputs, system), system)) {
    out[name] = center_of_sets(sets);
  }
  return out;
}

Outputs evaluate(const Inputs& inputs, const IT2FuzzySystem& system) {
  Outputs out;
  for (const auto& [name, interval] : type_reduce(inputs, system)) {
    out[name] = defuzzify(interval);
  }
  return out;
}

double evaluate_scalar(double x, const IT2FuzzySystem& system) {
  if (system.inputs().size() != 1 || system.outputs().size() != 1) {
    throw std::invalid_argument("evaluate_scalar needs a single-input single-output system");
  }
  const auto out = evaluate({{system.inputs().front().name(), x}}, system);
  const auto it = out.find(system.outputs().front().name());
  if (it == out.end()) throw NoRuleFiredError();
  return it->second;
}

}  // namespace hri::fuzzy
