#include "hri/fuzzy/membership.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hri::fuzzy {

namespace {

double gaussian(double distance, double sigma) {
  return std::exp(-(distance * distance) / (2.0 * sigma * sigma));
}

}  // namespace

void Universe::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("universe: lo must be < hi");
  if (points < 2) throw std::invalid_argument("universe: need at least 2 points");
}

double Universe::clamp(double x) const { return std::clamp(x, lo, hi); }

std::vector<double> Universe::grid() const {
  std::vector<double> out(static_cast<std::size_t>(points));
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
  out.back() = hi;
  return out;
}

double GaussianMF::degree(double x) const { return gaussian(x - center, sigma); }

double mf_degree(double x, const GaussianMF& mf) { return mf.degree(x); }

FiringInterval IT2GaussianMF::degree(double x) const {
  const double d = std::abs(x - center);
  const double upper = d <= spread ? 1.0 : gaussian(d - spread, sigma);
  const double lower = gaussian(d + spread, sigma);
  return {lower, upper};
}

FiringInterval it2_degree(double x, const IT2GaussianMF& mf) { return mf.degree(x); }

}  // namespace hri::fuzzy
