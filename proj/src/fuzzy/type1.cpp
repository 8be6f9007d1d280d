#include "hri/fuzzy/type1.hpp"

#include <algorithm>

namespace hri::fuzzy {

Outputs evaluate_type1(const Inputs& inputs, const IT2FuzzySystem& system) {
  // output -> (term -> strength)
  std::map<std::string, std::map<std::string, double>> strengths;
  for (const auto& rule : system.rules()) {
    double w = 1.0;
    for (const auto& a : rule.antecedents) {
      const auto it = inputs.find(a.variable);
      if (it == inputs.end()) throw MissingInputError(a.variable);
      const auto& var = system.input(a.variable);
      w = std::min(w, var.term(a.term).mf.principal().degree(var.universe().clamp(it->second)));
    }
    auto& slot = strengths[rule.consequent.variable][rule.consequent.term];
    slot = std::max(slot, w);
  }

  Outputs out;
  for (const auto& [name, terms] : strengths) {
    const auto& var = system.output(name);
    double num = 0.0;
    double den = 0.0;
    for (const auto& [label, w] : terms) {
      num += w * var.universe().clamp(var.term(label).mf.center);
      den += w;
    }
    if (!(den > 0.0)) throw NoRuleFiredError();
    out[name] = num / den;
  }
  return out;
}

}  // namespace hri::fuzzy
