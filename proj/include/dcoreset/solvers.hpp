#pragma once

// Local constant-approximation solvers: D^e seeding followed by weighted
// Lloyd refinement (centroid update for k-means, Weiszfeld for k-median).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "dcoreset/error.hpp"
#include "dcoreset/geometry.hpp"
#include "dcoreset/rng.hpp"

namespace dcoreset {

struct SolverParams {
  std::size_t max_iters = 100;
  double rel_tol = 1e-4;
  std::size_t weiszfeld_iters = 50;
  double weiszfeld_eps = 1e-10;

  void validate() const {
    if (max_iters == 0 || weiszfeld_iters == 0 || !(rel_tol > 0.0) || !(weiszfeld_eps > 0.0))
      throw Error("solver parameters must be positive");
  }
};

/// D^e seeding. The first center is drawn proportionally to weight, each later
/// one proportionally to w(p) * d(p, chosen)^e. When every remaining point
/// coincides with a chosen center the last center is repeated up to k.
inline Centers seed(const WeightedPointSet& points, std::size_t k, Objective obj, Rng& rng) {
  if (k == 0) throw Error("seed: k must be >= 1");
  if (points.empty()) throw Error("seed: empty point set");
  for (double w : points.weights())
    if (w < 0.0) throw Error("seed: negative weights are not allowed");

  const std::size_t n = points.size();
  Centers centers(points.dim());
  centers.reserve(k);

  std::size_t first = DiscreteSampler(points.weights())(rng);
  centers.push_back(points.point(first));

  std::vector<double> nearest_sq(n);
  for (std::size_t i = 0; i < n; ++i)
    nearest_sq[i] = detail::squared_distance_unchecked(points.point(i), centers[0]);

  std::vector<double> mass(n);
  while (centers.size() < k) {
    for (std::size_t i = 0; i < n; ++i) mass[i] = points.weight(i) * cost_from_squared(nearest_sq[i], obj);
    DiscreteSampler sampler(mass);
    if (!(sampler.total() > 0.0)) break;
    const std::size_t next = sampler(rng);
    centers.push_back(points.point(next));
    const PointView c = centers[centers.size() - 1];
    for (std::size_t i = 0; i < n; ++i)
      nearest_sq[i] = std::min(nearest_sq[i], detail::squared_distance_unchecked(points.point(i), c));
  }

  const Point last(centers[centers.size() - 1].begin(), centers[centers.size() - 1].end());
  while (centers.size() < k) centers.push_back(last);
  return centers;
}

namespace detail {

/// Weighted Weiszfeld iteration over the members of one cluster, started from
/// `start`. Distances are floored at eps so the update is defined on data points.
inline Point weiszfeld(const WeightedPointSet& points, std::span<const std::size_t> members, PointView start,
                       std::size_t iters, double eps) {
  const std::size_t d = points.dim();
  Point y(start.begin(), start.end());
  Point next(d);
  for (std::size_t it = 0; it < iters; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    double denom = 0.0;
    for (std::size_t i : members) {
      const double u = points.weight(i) / std::max(eps, std::sqrt(squared_distance_unchecked(points.point(i), y)));
      denom += u;
      const PointView p = points.point(i);
      for (std::size_t j = 0; j < d; ++j) next[j] += u * p[j];
    }
    if (!(denom > 0.0)) break;
    double shift = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      next[j] /= denom;
      shift += (next[j] - y[j]) * (next[j] - y[j]);
    }
    y.swap(next);
    if (std::sqrt(shift) <= eps) break;
  }
  return y;
}

inline double cluster_cost(const WeightedPointSet& points, std::span<const std::size_t> members, PointView c,
                           Objective obj) {
  double s = 0.0;
  for (std::size_t i : members)
    s += points.weight(i) * cost_from_squared(squared_distance_unchecked(points.point(i), c), obj);
  return s;
}

}  // namespace detail

struct RefineResult {
  Centers centers;
  /// Cost before the first iteration followed by the cost after each iteration.
  std::vector<double> cost_history;
};

/// Weighted Lloyd refinement. Cost is non-increasing from one iteration to
/// the next; an empty cluster is moved onto the point with the largest
/// weighted cost contribution.
inline RefineResult refine_with_history(const WeightedPointSet& points, const Centers& initial, Objective obj,
                                        const SolverParams& params = {}) {
  params.validate();
  if (initial.empty()) throw Error("refine: no initial centers");
  if (points.empty()) return {initial, {0.0}};
  detail::check_dims(points.dim(), initial.dim());
  for (double w : points.weights())
    if (w < 0.0) throw Error("refine: negative weights are not allowed");

  const std::size_t n = points.size();
  const std::size_t k = initial.size();
  const std::size_t d = points.dim();

  RefineResult result{initial, {}};
  Centers& centers = result.centers;

  std::vector<std::size_t> label(n);
  std::vector<double> contribution(n);
  auto assign = [&] {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Nearest nearest = closest_center(points.point(i), centers);
      label[i] = nearest.index;
      contribution[i] = points.weight(i) * cost_from_squared(nearest.squared_distance, obj);
      total += contribution[i];
    }
    return total;
  };

  double current = assign();
  result.cost_history.push_back(current);

  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t iter = 0; iter < params.max_iters && current > 0.0; ++iter) {
    for (auto& m : members) m.clear();
    for (std::size_t i = 0; i < n; ++i) members[label[i]].push_back(i);

    std::vector<double> spare = contribution;
    for (std::size_t c = 0; c < k; ++c) {
      const auto& mem = members[c];
      double mass = 0.0;
      for (std::size_t i : mem) mass += points.weight(i);

      if (mem.empty()) {
        const auto it = std::max_element(spare.begin(), spare.end());
        if (*it > 0.0) {
          const std::size_t i = static_cast<std::size_t>(it - spare.begin());
          const PointView p = points.point(i);
          std::copy(p.begin(), p.end(), centers[c].begin());
          *it = 0.0;
        }
        continue;
      }
      if (!(mass > 0.0)) continue;

      if (obj == Objective::KMeans) {
        Point centroid(d, 0.0);
        for (std::size_t i : mem) {
          const PointView p = points.point(i);
          for (std::size_t j = 0; j < d; ++j) centroid[j] += points.weight(i) * p[j];
        }
        for (double& x : centroid) x /= mass;
        std::copy(centroid.begin(), centroid.end(), centers[c].begin());
      } else {
        const Point proposal =
            detail::weiszfeld(points, mem, centers[c], params.weiszfeld_iters, params.weiszfeld_eps);
        if (detail::cluster_cost(points, mem, proposal, obj) <= detail::cluster_cost(points, mem, centers[c], obj))
          std::copy(proposal.begin(), proposal.end(), centers[c].begin());
      }
    }

    const double updated = assign();
    result.cost_history.push_back(updated);
    const double improvement = (current - updated) / current;
    current = updated;
    if (improvement < params.rel_tol) break;
  }
  return result;
}

inline Centers refine(const WeightedPointSet& points, const Centers& initial, Objective obj,
                      const SolverParams& params = {}) {
  return refine_with_history(points, initial, obj, params).centers;
}

struct LocalSolution {
  Centers centers;
  double cost = 0.0;
};

/// Seed-and-refine constant approximation for one site. Inputs carrying
/// negative weights are solved and costed on their positive part.
inline LocalSolution local_approximation(const WeightedPointSet& points, std::size_t k, Objective obj, Rng& rng,
                                         const SolverParams& params = {}) {
  if (points.empty()) throw Error("local_approximation: empty point set");
  if (points.has_negative_weights()) {
    const WeightedPointSet positive = points.positive_part();
    return local_approximation(positive, k, obj, rng, params);
  }
  Centers centers = refine(points, seed(points, k, obj, rng), obj, params);
  const double c = cost(points, centers, obj);
  return {std::move(centers), c};
}

}  // namespace dcoreset
