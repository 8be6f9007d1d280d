#include <doctest.h>

#include <cmath>
#include <random>

#include "hri/fuzzy/membership.hpp"
#include "support/oracles.hpp"

using namespace hri::fuzzy;

TEST_CASE("gaussian membership") {
  const GaussianMF mf{12.0, 4.0};
  CHECK(mf_degree(12.0, mf) == 1.0);
  CHECK(mf_degree(16.0, mf) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(mf_degree(16.0, mf) == doctest::Approx(0.60653).epsilon(1e-5));
  for (double d : {0.5, 3.0, 17.0, 250.0}) {
    CHECK(mf_degree(12.0 + d, mf) == mf_degree(12.0 - d, mf));
  }
}

TEST_CASE("interval type-2 membership") {
  SUBCASE("zero spread collapses to the principal gaussian") {
    const IT2GaussianMF mf{-30.0, 10.0, 0.0};
    for (double x : {-100.0, -31.0, -30.0, 0.0, 55.5}) {
      const auto d = it2_degree(x, mf);
      CHECK(d.lower == d.upper);
      CHECK(d.upper == mf_degree(x, mf.principal()));
    }
  }
  SUBCASE("plateau of the upper membership") {
    const IT2GaussianMF mf{0.0, 10.0, 2.0};
    CHECK(it2_degree(0.0, mf).upper == 1.0);
    CHECK(it2_degree(1.9, mf).upper == 1.0);
    CHECK(it2_degree(-2.0, mf).upper == 1.0);
    CHECK(it2_degree(2.1, mf).upper < 1.0);
  }
  SUBCASE("matches max/min over candidate centers") {
    const IT2GaussianMF mf{0.0, 10.0, 2.0};
    const auto d = it2_degree(5.0, mf);
    const auto [lo, hi] = hri::oracle::gaussian_envelope(5.0, 0.0, 10.0, 2.0);
    CHECK(d.upper == doctest::Approx(hi).epsilon(1e-9));
    CHECK(d.lower == doctest::Approx(lo).epsilon(1e-9));
    CHECK(d.upper == doctest::Approx(std::exp(-9.0 / 200.0)).epsilon(1e-12));
    CHECK(d.lower == doctest::Approx(std::exp(-49.0 / 200.0)).epsilon(1e-12));
  }
  SUBCASE("lower never exceeds upper") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> x(-300.0, 300.0), c(-100.0, 100.0),
        s(0.5, 40.0), sp(0.0, 10.0);
    for (int i = 0; i < 5000; ++i) {
      const IT2GaussianMF mf{c(rng), s(rng), sp(rng)};
      const auto d = it2_degree(x(rng), mf);
      REQUIRE(0.0 <= d.lower);
      REQUIRE(d.lower <= d.upper);
      REQUIRE(d.upper <= 1.0);
    }
  }
}

TEST_CASE("universe grid") {
  const Universe u;
  const auto g = u.grid();
  REQUIRE(g.size() == 200);
  CHECK(g.front() == -100.0);
  CHECK(g.back() == 100.0);
  const double step = 200.0 / 199.0;
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] - g[i - 1] == doctest::Approx(step));

  CHECK_THROWS_AS((Universe{1.0, 1.0, 10}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Universe{0.0, 1.0, 1}.validate()), std::invalid_argument);
  CHECK(u.clamp(250.0) == 100.0);
  CHECK(u.clamp(-250.0) == -100.0);
}
