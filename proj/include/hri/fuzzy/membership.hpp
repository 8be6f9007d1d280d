#pragma once

#include <vector>

namespace hri::fuzzy {

/// Closed interval of universe values sampled on an even grid.
struct Universe {
  double lo = -100.0;
  double hi = 100.0;
  int points = 200;

  void validate() const;

  double clamp(double x) const;

  /// `points` evenly spaced samples, both endpoints included. Used for
  /// plotting and coverage diagnostics; inference itself is analytic.
  std::vector<double> grid() const;
};

/// Membership interval [lower, upper] of an interval type-2 set.
struct FiringInterval {
  double lower = 0.0;
  double upper = 0.0;

  bool degenerate() const { return lower == upper; }
};

struct GaussianMF {
  double center = 0.0;
  double sigma = 1.0;

  double degree(double x) const;
};

double mf_degree(double x, const GaussianMF& mf);

/// Gaussian with an uncertain mean in [center - spread, center + spread].
/// The upper MF is flat (= 1) across that range; the lower MF takes the
/// farther admissible mean.
struct IT2GaussianMF {
  double center = 0.0;
  double sigma = 1.0;
  double spread = 0.0;

  FiringInterval degree(double x) const;

  GaussianMF principal() const { return {center, sigma}; }

  /// Centroid of the set used by center-of-sets type reduction.
  FiringInterval centroid() const { return {center - spread, center + spread}; }
};

FiringInterval it2_degree(double x, const IT2GaussianMF& mf);

}  // namespace hri::fuzzy
