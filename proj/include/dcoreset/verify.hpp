#pragma once

// Executable checks: empirical coreset error, exact optima for tiny
// instances, unbiasedness of the sampling stage, and the squared-distance
// perturbation bound used in the k-means analysis.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "dcoreset/coreset.hpp"
#include "dcoreset/error.hpp"
#include "dcoreset/geometry.hpp"
#include "dcoreset/rng.hpp"

namespace dcoreset {

/// Candidate center sets: half are k points drawn uniformly from P, the
/// other half are those same sets moved by Gaussian noise with the data's
/// per-coordinate standard deviation.
inline std::vector<Centers> candidate_centers(const WeightedPointSet& points, std::size_t count, std::size_t k,
                                              Rng& rng) {
  if (points.empty()) throw Error("candidate_centers: empty dataset");
  if (k == 0) throw Error("candidate_centers: k must be >= 1");
  const std::size_t d = points.dim();
  const std::size_t n = points.size();

  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += points.point(i)[j];
  for (double& x : mean) x /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) var[j] += (points.point(i)[j] - mean[j]) * (points.point(i)[j] - mean[j]);
  double avg_var = 0.0;
  for (double v : var) avg_var += v / static_cast<double>(n);
  const double noise = std::sqrt(avg_var / static_cast<double>(d));

  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Centers> out;
  out.reserve(count);
  while (out.size() < count) {
    Centers drawn(d);
    for (std::size_t c = 0; c < k; ++c) drawn.push_back(points.point(pick(rng)));
    out.push_back(drawn);
    if (out.size() == count) break;
    Centers moved = drawn;
    for (std::size_t c = 0; c < k; ++c)
      for (double& x : moved[c]) x += noise * gauss(rng);
    out.push_back(std::move(moved));
  }
  return out;
}

/// max over candidates of |coreset cost - true cost| / true cost, skipping
/// candidates whose true cost is below 1e-12.
inline double max_relative_error(const WeightedPointSet& coreset, const WeightedPointSet& points,
                                 std::span<const Centers> candidates, Objective obj) {
  double worst = 0.0;
  bool any = false;
  for (const Centers& x : candidates) {
    const double truth = cost(points, x, obj);
    if (truth < 1e-12) continue;
    any = true;
    worst = std::max(worst, std::abs(cost(coreset, x, obj) - truth) / truth);
  }
  if (!any) throw Error("check_coreset: every candidate center set has zero true cost");
  return worst;
}

inline double check_coreset(const WeightedPointSet& coreset, const WeightedPointSet& points, Objective obj,
                            std::size_t num_center_sets, std::size_t k, Rng& rng) {
  const auto candidates = candidate_centers(points, num_center_sets, k, rng);
  return max_relative_error(coreset, points, candidates, obj);
}

namespace detail {

inline constexpr std::size_t kBruteForceLimit = 12;

/// Weighted 1-D median along the line through the points.
inline double collinear_median_cost(const std::vector<Point>& pts, const std::vector<double>& w) {
  std::size_t far = 0;
  double best = -1.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double sq = squared_distance_unchecked(pts[0], pts[i]);
    if (sq > best) {
      best = sq;
      far = i;
    }
  }
  const std::size_t d = pts[0].size();
  std::vector<std::pair<double, std::size_t>> proj;
  Point dir(d);
  for (std::size_t j = 0; j < d; ++j) dir[j] = pts[far][j] - pts[0][j];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += (pts[i][j] - pts[0][j]) * dir[j];
    proj.push_back({s, i});
  }
  std::sort(proj.begin(), proj.end());
  double total = 0.0;
  for (double x : w) total += x;
  double run = 0.0;
  std::size_t median = proj.back().second;
  for (const auto& [s, i] : proj) {
    run += w[i];
    if (run >= total / 2.0) {
      median = i;
      break;
    }
  }
  double c = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) c += w[i] * std::sqrt(squared_distance_unchecked(pts[i], pts[median]));
  return c;
}

inline bool collinear(const std::vector<Point>& pts) {
  if (pts.size() <= 2) return true;
  const std::size_t d = pts[0].size();
  std::size_t anchor = pts.size();
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (squared_distance_unchecked(pts[0], pts[i]) > 0.0) {
      anchor = i;
      break;
    }
  if (anchor == pts.size()) return true;
  Point u(d);
  double norm = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    u[j] = pts[anchor][j] - pts[0][j];
    norm += u[j] * u[j];
  }
  norm = std::sqrt(norm);
  for (double& x : u) x /= norm;
  for (const Point& p : pts) {
    double along = 0.0, len2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      along += (p[j] - pts[0][j]) * u[j];
      len2 += (p[j] - pts[0][j]) * (p[j] - pts[0][j]);
    }
    if (len2 - along * along > 1e-18 * std::max(1.0, len2)) return false;
  }
  return true;
}

/// Optimal single-center cost of a weighted group.
inline double one_center_cost(const std::vector<Point>& pts, const std::vector<double>& w, Objective obj) {
  const std::size_t d = pts[0].size();
  double mass = 0.0;
  for (double x : w) mass += x;
  Point centroid(d, 0.0);
  if (mass > 0.0)
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < d; ++j) centroid[j] += w[i] * pts[i][j] / mass;

  auto cost_at = [&](const Point& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      s += w[i] * cost_from_squared(squared_distance_unchecked(pts[i], c), obj);
    return s;
  };

  if (obj == Objective::KMeans) return cost_at(centroid);
  if (collinear(pts)) return collinear_median_cost(pts, w);

  Point y = centroid, next(d);
  for (int it = 0; it < 200; ++it) {
    double denom = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    bool at_point = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double dist = std::sqrt(squared_distance_unchecked(pts[i], y));
      if (dist < 1e-15) {
        at_point = true;
        continue;
      }
      denom += w[i] / dist;
      for (std::size_t j = 0; j < d; ++j) next[j] += w[i] * pts[i][j] / dist;
    }
    if (!(denom > 0.0)) break;
    for (double& x : next) x /= denom;
    const double shift = std::sqrt(squared_distance_unchecked(next, y));
    y = next;
    if (shift < 1e-12 || at_point) break;
  }
  double best = cost_at(y);
  for (const Point& p : pts) best = std::min(best, cost_at(p));
  return best;
}

}  // namespace detail

/// Exact optimum over all partitions of at most 12 points into at most k
/// groups, each served by its optimal single center.
inline double brute_force_optimal(const WeightedPointSet& points, std::size_t k, Objective obj) {
  const std::size_t n = points.size();
  if (n > detail::kBruteForceLimit) throw Error("brute_force_optimal: more than 12 points");
  if (k == 0) throw Error("brute_force_optimal: k must be >= 1");
  if (n == 0) return 0.0;
  for (double w : points.weights())
    if (w < 0.0) throw Error("brute_force_optimal: negative weights are not allowed");

  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<double> group(full + 1, 0.0);
  for (std::size_t mask = 1; mask <= full; ++mask) {
    std::vector<Point> pts;
    std::vector<double> w;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) {
        pts.emplace_back(points.point(i).begin(), points.point(i).end());
        w.push_back(points.weight(i));
      }
    group[mask] = detail::one_center_cost(pts, w, obj);
  }

  // best[mask]: optimum for `mask` using at most `groups` centers.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(full + 1, inf);
  best[0] = 0.0;
  for (std::size_t groups = 1; groups <= std::min(k, n); ++groups) {
    std::vector<double> next(full + 1, inf);
    next[0] = 0.0;
    for (std::size_t mask = 1; mask <= full; ++mask) {
      const std::size_t low = mask & (~mask + 1);
      const std::size_t rest = mask ^ low;
      for (std::size_t sub = rest;; sub = (sub - 1) & rest) {
        const std::size_t block = sub | low;
        next[mask] = std::min(next[mask], group[block] + best[mask ^ block]);
        if (sub == 0) break;
      }
    }
    best.swap(next);
  }
  return best[full];
}

struct UnbiasedReport {
  double mean = 0.0;
  double standard_error = 0.0;
  double truth = 0.0;
  std::size_t reps = 0;

  /// |mean - truth| <= 3 standard errors, with 1e-9 relative slack for
  /// zero-variance cases.
  bool passed() const { return std::abs(mean - truth) <= 3.0 * standard_error + 1e-9 * std::abs(truth); }
};

/// Repeats the sampling stage `reps` times with the local solutions held
/// fixed and reports the mean and standard error of the coreset cost at X.
inline UnbiasedReport check_unbiased(std::span<const WeightedPointSet> sites, std::span<const Centers> local_centers,
                                     const Centers& x, std::size_t t, Objective obj, std::size_t reps, Rng& rng) {
  if (sites.size() != local_centers.size()) throw Error("check_unbiased: one center set per site required");
  if (reps == 0) throw Error("check_unbiased: reps must be >= 1");
  const std::size_t n = sites.size();

  std::vector<double> costs(n);
  UnbiasedReport report;
  report.reps = reps;
  for (std::size_t i = 0; i < n; ++i) {
    costs[i] = cost(sites[i].positive_part(), local_centers[i], obj);
    report.truth += cost(sites[i], x, obj);
  }
  double total = 0.0;
  for (double c : costs) total += c;
  const std::vector<std::size_t> allocation = (total > 0.0 && t > 0) ? allocate(costs, t) : std::vector<std::size_t>(n, 0);

  const std::uint64_t base = rng();
  std::vector<double> values(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng stream = make_stream(base, r);
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const CoresetPortion portion =
          sample_portion(sites[i], local_centers[i], allocation[i], 2.0 * total, t, obj, stream, i);
      value += cost(union_of(portion), x, obj);
    }
    values[r] = value;
  }
  const double r = static_cast<double>(reps);
  report.mean = std::accumulate(values.begin(), values.end(), 0.0) / r;
  double ss = 0.0;
  for (double v : values) ss += (v - report.mean) * (v - report.mean);
  const double var = reps > 1 ? ss / (r - 1.0) : 0.0;
  report.standard_error = std::sqrt(var / r);
  return report;
}

struct TechBoundCase {
  bool hypothesis = false;
  bool conclusion = false;
};

/// If d(p,b)^2 / eps <= |d(p,X)^2 - d(b,X)^2| then
/// |d(p,X)^2 - d(b,X)^2| <= 8 eps min{d(p,X)^2, d(b,X)^2}.
inline TechBoundCase tech_bound_case(PointView p, PointView b, const Centers& x, double eps) {
  const double pb2 = squared_distance(p, b);
  const double px2 = closest_center(p, x).squared_distance;
  const double bx2 = closest_center(b, x).squared_distance;
  const double gap = std::abs(px2 - bx2);
  TechBoundCase out;
  out.hypothesis = pb2 / eps <= gap;
  const double bound = 8.0 * eps * std::min(px2, bx2);
  out.conclusion = gap <= bound + 1e-12 * std::max({px2, bx2, 1e-300});
  return out;
}

struct TechBoundReport {
  std::size_t trials = 0;
  std::size_t hypothesis_held = 0;
  std::size_t violations = 0;

  struct Counterexample {
    Point p, b;
    Centers x;
    double eps;
  };
  std::optional<Counterexample> first_violation;

  bool passed() const { return violations == 0; }
};

/// Random trials in R^dim with eps in (0, eps_max]. Most trials place b close
/// enough to p for the hypothesis to hold; the rest are unconstrained.
inline TechBoundReport check_tech_bound(std::size_t trials, Rng& rng, std::size_t dim = 3, double eps_max = 0.05) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> centers_count(1, 4);

  TechBoundReport report;
  report.trials = trials;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const double eps = eps_max * (1.0 - unit(rng));
    const double scale = std::exp(4.0 * (unit(rng) - 0.5));
    Point p(dim);
    for (double& v : p) v = scale * gauss(rng);
    Centers x(dim);
    const std::size_t kc = centers_count(rng);
    for (std::size_t c = 0; c < kc; ++c) {
      Point xc(dim);
      for (double& v : xc) v = scale * gauss(rng);
      x.push_back(xc);
    }

    Point dir(dim);
    double norm = 0.0;
    for (double& v : dir) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const double reach = (trial % 5 == 4) ? scale * 2.0 * unit(rng)
                                          : 3.0 * eps * std::sqrt(closest_center(p, x).squared_distance) * unit(rng);
    Point b(dim);
    for (std::size_t j = 0; j < dim; ++j) b[j] = p[j] + reach * dir[j] / norm;

    const TechBoundCase c = tech_bound_case(p, b, x, eps);
    if (!c.hypothesis) continue;
    ++report.hypothesis_held;
    if (!c.conclusion) {
      ++report.violations;
      if (!report.first_violation) report.first_violation = TechBoundReport::Counterexample{p, b, x, eps};
    }
  }
  return report;
}

}  // namespace dcoreset
