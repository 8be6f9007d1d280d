#include "hri/fuzzy/type_reduction.hpp"

#include <algorithm>
#include <vector>

namespace hri::fuzzy {

namespace {

struct Point {
  double c;
  double lower;
  double upper;
};

// Index k in [0, n-2] with c[k] <= y <= c[k+1]; n >= 2.
std::size_t switch_point(const std::vector<Point>& pts, double y) {
  std::size_t k = 0;
  while (k + 2 < pts.size() && pts[k + 1].c <= y) ++k;
  return k;
}

// Weighted centroid with weights taken from `upper` up to and including k
// and from `lower` after it (left end), or the reverse (right end).
double switched_mean(const std::vector<Point>& pts, std::size_t k, bool left) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool head = i <= k;
    const double w = (head == left) ? pts[i].upper : pts[i].lower;
    num += w * pts[i].c;
    den += w;
  }
  return num / den;
}

double karnik_mendel(std::vector<Point> pts, bool left, int& iterations) {
  std::stable_sort(pts.begin(), pts.end(),
                   [](const Point& a, const Point& b) { return a.c < b.c; });
  iterations = 0;
  if (pts.size() == 1) return pts.front().c;

  double num = 0.0;
  double den = 0.0;
  for (const auto& p : pts) {
    const double w = 0.5 * (p.lower + p.upper);
    num += w * p.c;
    den += w;
  }
  double y = num / den;
  std::size_t prev = pts.size();  // sentinel: no switch point yet
  for (;;) {
    const std::size_t k = switch_point(pts, y);
    if (k == prev) return y;
    ++iterations;
    prev = k;
    y = switched_mean(pts, k, left);
  }
}

}  // namespace

TypeReducedInterval center_of_sets(std::span<const WeightedCentroid> firings,
                                   KarnikMendelTrace* trace) {
  std::vector<Point> left;
  std::vector<Point> right;
  for (const auto& f : firings) {
    if (!(f.firing.upper > 0.0)) continue;
    left.push_back({f.centroid.lower, f.firing.lower, f.firing.upper});
    right.push_back({f.centroid.upper, f.firing.lower, f.firing.upper});
  }
  if (left.empty()) throw NoRuleFiredError();

  KarnikMendelTrace local;
  TypeReducedInterval out;
  out.y_l = karnik_mendel(std::move(left), true, local.left_iterations);
  out.y_r = karnik_mendel(std::move(right), false, local.right_iterations);
  if (out.y_l > out.y_r) out.y_l = out.y_r = 0.5 * (out.y_l + out.y_r);
  if (trace) *trace = local;
  return out;
}

double defuzzify(const TypeReducedInterval& interval) {
  return 0.5 * (interval.y_l + interval.y_r);
}

}  // namespace hri::fuzzy
