#include "hri/fuzzy/config.hpp"

#include <fstream>

namespace hri::fuzzy {

using nlohmann::json;

namespace {

LinguisticVariable variable_from_json(const json& v) {
  Universe u;
  if (v.contains("universe")) {
    const auto& j = v.at("universe");
    u.lo = j.value("lo", u.lo);
    u.hi = j.value("hi", u.hi);
    u.points = j.value("points", u.points);
  }
  std::vector<Term> terms;
  for (const auto& t : v.at("terms")) {
    terms.push_back({t.at("label").get<std::string>(),
                     {t.at("center").get<double>(), t.at("sigma").get<double>(),
                      t.value("delta", 0.0)}});
  }
  return LinguisticVariable(v.at("name").get<std::string>(), u, std::move(terms));
}

json variable_to_json(const LinguisticVariable& v) {
  json terms = json::array();
  for (const auto& t : v.terms()) {
    terms.push_back({{"label", t.label},
                     {"center", t.mf.center},
                     {"sigma", t.mf.sigma},
                     {"delta", t.mf.spread}});
  }
  return {{"name", v.name()},
          {"universe",
           {{"lo", v.universe().lo}, {"hi", v.universe().hi}, {"points", v.universe().points}}},
          {"terms", terms}};
}

Clause clause_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError("rule clause must be a [variable, term] pair");
  }
  return {j[0].get<std::string>(), j[1].get<std::string>()};
}

}  // namespace

IT2FuzzySystem system_from_json(const json& doc) {
  try {
    if (doc.value("tnorm", std::string("minimum")) != "minimum") {
      throw ConfigError("only the minimum t-norm is supported");
    }
    if (doc.value("snorm", std::string("maximum")) != "maximum") {
      throw ConfigError("only the maximum s-norm is supported");
    }
    std::vector<LinguisticVariable> inputs;
    std::vector<LinguisticVariable> outputs;
    for (const auto& v : doc.at("inputs")) inputs.push_back(variable_from_json(v));
    for (const auto& v : doc.at("outputs")) outputs.push_back(variable_from_json(v));
    std::vector<Rule> rules;
    for (const auto& r : doc.at("rules")) {
      Rule rule;
      for (const auto& a : r.at("if")) rule.antecedents.push_back(clause_from_json(a));
      rule.consequent = clause_from_json(r.at("then"));
      rules.push_back(std::move(rule));
    }
    return IT2FuzzySystem(std::move(inputs), std::move(outputs), std::move(rules));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("fuzzy config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("fuzzy config: ") + e.what());
  }
}

json system_to_json(const IT2FuzzySystem& system) {
  json doc;
  doc["tnorm"] = "minimum";
  doc["snorm"] = "maximum";
  doc["inputs"] = json::array();
  doc["outputs"] = json::array();
  for (const auto& v : system.inputs()) doc["inputs"].push_back(variable_to_json(v));
  for (const auto& v : system.outputs()) doc["outputs"].push_back(variable_to_json(v));
  json rules = json::array();
  for (const auto& r : system.rules()) {
    json ifs = json::array();
    for (const auto& a : r.antecedents) ifs.push_back({a.variable, a.term});
    rules.push_back({{"if", ifs}, {"then", {r.consequent.variable, r.consequent.term}}});
  }
  doc["rules"] = rules;
  return doc;
}

IT2FuzzySystem load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return system_from_json(doc);
}

}  // namespace hri::fuzzy
