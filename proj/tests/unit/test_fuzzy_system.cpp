#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hri/fuzzy/config.hpp"
#include "hri/fuzzy/system.hpp"
#include "hri/fuzzy/type1.hpp"

using namespace hri::fuzzy;

namespace {

IT2FuzzySystem two_input_system(double spread) {
  auto ex = LinguisticVariable::standard("ex", Universe{}, spread);
  auto ey = LinguisticVariable::standard("ey", Universe{}, spread);
  auto out = LinguisticVariable::standard("out", Universe{}, spread);
  std::vector<Rule> rules;
  for (std::size_t i = 0; i < kTermLabels.size(); ++i) {
    for (std::size_t j = 0; j < kTermLabels.size(); ++j) {
      const std::size_t k = std::clamp<long>(10 - static_cast<long>((i + j) / 2), 0, 10);
      rules.push_back({{{"ex", std::string(kTermLabels[i])}, {"ey", std::string(kTermLabels[j])}},
                       {"out", std::string(kTermLabels[k])}});
    }
  }
  return IT2FuzzySystem({ex, ey}, {out}, rules);
}

}  // namespace

TEST_CASE("standard variable layout") {
  const auto v = LinguisticVariable::standard("e");
  REQUIRE(v.terms().size() == 11);
  CHECK(v.terms().front().label == "NegativeVeryLarge");
  CHECK(v.terms()[5].label == "Zero");
  CHECK(v.terms().back().label == "PositiveVeryLarge");
  for (std::size_t i = 0; i < 11; ++i) {
    CHECK(v.terms()[i].mf.center == doctest::Approx(-100.0 + 20.0 * static_cast<double>(i)));
    CHECK(v.terms()[i].mf.sigma == 10.0);
    CHECK(v.terms()[i].mf.spread == 2.0);
    CHECK(v.terms()[i].mf.center == -v.terms()[10 - i].mf.center);
  }
  // Adjacent terms cross near half membership.
  CHECK(v.term("Zero").mf.principal().degree(10.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("variable validation") {
  auto terms = LinguisticVariable::standard("e").terms();
  SUBCASE("wrong label") {
    terms[3].label = "Smallish";
    CHECK_THROWS_AS(LinguisticVariable("e", {}, terms), std::invalid_argument);
  }
  SUBCASE("asymmetric layout") {
    terms[1].mf.center = -79.0;
    CHECK_THROWS_AS(LinguisticVariable("e", {}, terms), std::invalid_argument);
  }
  SUBCASE("non-increasing centers") {
    std::swap(terms[0].mf.center, terms[1].mf.center);
    CHECK_THROWS_AS(LinguisticVariable("e", {}, terms), std::invalid_argument);
  }
  SUBCASE("bad sigma") {
    terms[4].mf.sigma = 0.0;
    CHECK_THROWS_AS(LinguisticVariable("e", {}, terms), std::invalid_argument);
  }
  SUBCASE("too few terms") {
    terms.pop_back();
    CHECK_THROWS_AS(LinguisticVariable("e", {}, terms), std::invalid_argument);
  }
}

TEST_CASE("system validation") {
  const auto e = LinguisticVariable::standard("error");
  const auto c = LinguisticVariable::standard("correction");
  CHECK_THROWS_AS(IT2FuzzySystem({e}, {c}, {}), std::invalid_argument);
  CHECK_THROWS_AS(IT2FuzzySystem({e}, {c}, {Rule{{}, {"correction", "Zero"}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(IT2FuzzySystem({e}, {c}, {Rule{{{"nope", "Zero"}}, {"correction", "Zero"}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(IT2FuzzySystem({e}, {c}, {Rule{{{"error", "Huge"}}, {"correction", "Zero"}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(IT2FuzzySystem({e}, {c}, {Rule{{{"error", "Zero"}}, {"other", "Zero"}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(IT2FuzzySystem({e}, {e}, {Rule{{{"error", "Zero"}}, {"error", "Zero"}}}),
                  std::invalid_argument);
}

TEST_CASE("coverage is enforced") {
  Universe u;
  auto terms = LinguisticVariable::standard("e").terms();
  for (auto& t : terms) t.mf.sigma = 0.05;  // so narrow the tails underflow
  const LinguisticVariable narrow("e", u, terms);
  const auto c = LinguisticVariable::standard("c");
  CHECK_THROWS_AS(IT2FuzzySystem({narrow}, {c}, {Rule{{{"e", "Zero"}}, {"c", "Zero"}}}),
                  std::invalid_argument);
}

TEST_CASE("fire_rules") {
  const auto sys = IT2FuzzySystem::default_axis_controller();
  SUBCASE("single antecedent equals its membership interval") {
    const auto f = fire_rules({{"error", 13.0}}, sys);
    REQUIRE(f.size() == 11);
    for (const auto& rf : f) {
      const auto d = sys.input("error").term(rf.rule->antecedents[0].term).mf.degree(13.0);
      CHECK(rf.interval.lower == d.lower);
      CHECK(rf.interval.upper == d.upper);
    }
  }
  SUBCASE("missing input names the variable") {
    try {
      fire_rules({{"err", 1.0}}, sys);
      FAIL("expected MissingInputError");
    } catch (const MissingInputError& e) {
      CHECK(e.variable() == "error");
    }
  }
  SUBCASE("two antecedents take the elementwise minimum") {
    const auto two = two_input_system(2.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-100.0, 100.0);
    for (int i = 0; i < 50; ++i) {
      const double x = d(rng), y = d(rng);
      for (const auto& rf : fire_rules({{"ex", x}, {"ey", y}}, two)) {
        const auto a = two.input("ex").term(rf.rule->antecedents[0].term).mf.degree(x);
        const auto b = two.input("ey").term(rf.rule->antecedents[1].term).mf.degree(y);
        CHECK(rf.interval.lower == std::min(a.lower, b.lower));
        CHECK(rf.interval.upper == std::min(a.upper, b.upper));
      }
    }
  }
  SUBCASE("zero spread gives degenerate intervals") {
    const auto crisp = sys.with_spread(0.0);
    for (const auto& rf : fire_rules({{"error", -37.0}}, crisp)) {
      CHECK(rf.interval.degenerate());
    }
  }
}

TEST_CASE("evaluate on the default controller") {
  const auto sys = IT2FuzzySystem::default_axis_controller();
  CHECK(evaluate_scalar(0.0, sys) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(evaluate_scalar(0.0, sys)) < 1e-12);
  CHECK(evaluate_scalar(-40.0, sys) > 0.0);
  CHECK(evaluate_scalar(40.0, sys) < 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-150.0, 150.0);
  for (int i = 0; i < 500; ++i) {
    const double e = d(rng);
    const double y = evaluate_scalar(e, sys);
    CHECK(std::abs(evaluate_scalar(-e, sys) + y) < 1e-6);
    CHECK(y >= -100.0);
    CHECK(y <= 100.0);
    CHECK(evaluate_scalar(e, sys) == y);  // bit-identical repeat
  }
  // Out-of-universe errors saturate.
  CHECK(evaluate_scalar(400.0, sys) == evaluate_scalar(100.0, sys));
}

TEST_CASE("type-1 path equals the collapsed interval type-2 path") {
  const auto sys = IT2FuzzySystem::default_axis_controller(0.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-100.0, 100.0);
  for (int i = 0; i < 50; ++i) {
    const double e = d(rng);
    const double t2 = evaluate({{"error", e}}, sys).at("correction");
    const double t1 = evaluate_type1({{"error", e}}, sys).at("correction");
    CHECK(std::abs(t2 - t1) < 1e-9);
  }
  const auto two = two_input_system(0.0);
  for (int i = 0; i < 50; ++i) {
    const Inputs in{{"ex", d(rng)}, {"ey", d(rng)}};
    CHECK(std::abs(evaluate(in, two).at("out") - evaluate_type1(in, two).at("out")) < 1e-9);
  }
}

TEST_CASE("nonzero spread differs from type-1 but stays close") {
  const auto sys = IT2FuzzySystem::default_axis_controller(2.0);
  const double t2 = evaluate_scalar(33.0, sys);
  const double t1 = evaluate_type1({{"error", 33.0}}, sys).at("correction");
  CHECK(t2 != t1);
  CHECK(std::abs(t2 - t1) < 5.0);
}

TEST_CASE("rule base config round trip and errors") {
  const auto sys = IT2FuzzySystem::default_axis_controller(1.5);
  const auto doc = system_to_json(sys);
  const auto back = system_from_json(doc);
  CHECK(system_to_json(back) == doc);
  CHECK(evaluate_scalar(27.0, back) == evaluate_scalar(27.0, sys));

  auto bad = doc;
  bad["tnorm"] = "product";
  CHECK_THROWS_AS(system_from_json(bad), ConfigError);
  bad = doc;
  bad["rules"][0]["then"] = {"correction"};
  CHECK_THROWS_AS(system_from_json(bad), ConfigError);
  bad = doc;
  bad["inputs"][0]["terms"][2]["sigma"] = -1.0;
  CHECK_THROWS_AS(system_from_json(bad), ConfigError);
  CHECK_THROWS_AS(load_system("/nonexistent/rules.json"), ConfigError);
}
