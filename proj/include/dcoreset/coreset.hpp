#pragma once

// Communication-aware distributed coreset construction.
//
// Round 1: every site solves its local data to a constant factor (B_i) and
// shares cost(P_i, B_i). Round 2: the global sample budget t is split across
// sites proportionally to those costs; each site samples i.i.d. with
// probability proportional to m_p = 2 cost(p, B_i), weights every draw by
// (sum of all m) / (t m_q), and gives each local center the residual mass of
// the points it serves.
//
// The concentration analysis is usually written with m_p = cost(p, b_p); the
// factor 2 cancels in both the draw probabilities and in w_q * m_q, so the
// output distribution is identical.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "dcoreset/error.hpp"
#include "dcoreset/geometry.hpp"
#include "dcoreset/network.hpp"
#include "dcoreset/rng.hpp"
#include "dcoreset/solvers.hpp"

namespace dcoreset {

/// One site's slice of the coreset: sampled points S_i and weighted local
/// centers B_i.
struct CoresetPortion {
  std::size_t site_id = 0;
  WeightedPointSet sampled;
  WeightedPointSet centers;

  std::size_t size() const noexcept { return sampled.size() + centers.size(); }
  double total_weight() const { return sampled.total_weight() + centers.total_weight(); }

  friend bool operator==(const CoresetPortion&, const CoresetPortion&) = default;
};

/// Concatenates portions (sampled points first, then centers, site by site).
inline WeightedPointSet union_of(std::span<const CoresetPortion> portions) {
  WeightedPointSet out;
  for (const auto& portion : portions) {
    out.append(portion.sampled);
    out.append(portion.centers);
  }
  return out;
}

inline WeightedPointSet union_of(const CoresetPortion& portion) { return union_of(std::span(&portion, 1)); }

/// m_p = 2 w(p) d(p, B)^e. Negative input weights are floored at zero so such
/// points are never drawn; their mass still reaches the centers.
inline std::vector<double> sampling_weights(const WeightedPointSet& points, const Centers& centers, Objective obj) {
  std::vector<double> m(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    m[i] = 2.0 * std::max(points.weight(i), 0.0) * point_cost(points.point(i), centers, obj);
  return m;
}

/// Largest-remainder apportionment of t proportional to `local_costs`.
/// Remainder ties go to the lowest index; zero-cost sites receive nothing.
inline std::vector<std::size_t> allocate(std::span<const double> local_costs, std::size_t t) {
  double total = 0.0;
  for (double c : local_costs) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw Error("allocate: local costs must be finite and >= 0");
    total += c;
  }
  if (!(total > 0.0)) throw AllLocalCostsZero();

  const std::size_t n = local_costs.size();
  std::vector<std::size_t> share(n, 0);
  std::vector<double> remainder(n, 0.0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (local_costs[i] == 0.0) continue;
    const double quota = static_cast<double>(t) * local_costs[i] / total;
    share[i] = static_cast<std::size_t>(std::floor(quota));
    remainder[i] = quota - std::floor(quota);
    assigned += share[i];
  }
  // Rounding in the quotas can push the floor sum past t.
  for (std::size_t i = n; assigned > t && i-- > 0;)
    while (share[i] > 0 && assigned > t) {
      --share[i];
      --assigned;
    }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i)
    if (local_costs[i] > 0.0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t j = 0; assigned < t; j = (j + 1) % order.size()) {
    ++share[order[j]];
    ++assigned;
  }
  return share;
}

struct SamplingPlan {
  std::vector<double> local_costs;
  double total_cost = 0.0;
  std::size_t t = 0;
  std::vector<std::size_t> allocation;
};

inline SamplingPlan make_plan(std::span<const double> local_costs, std::size_t t) {
  SamplingPlan plan;
  plan.local_costs.assign(local_costs.begin(), local_costs.end());
  plan.total_cost = std::accumulate(local_costs.begin(), local_costs.end(), 0.0);
  plan.t = t;
  plan.allocation = allocate(local_costs, t);
  return plan;
}

/// Round 2 on one site. Draws t_i points i.i.d. with P(q = p) = m_p / sum m,
/// weights each draw global_m_sum / (t m_q), and sets
/// w_b = W(P_b) - sum of w_q over draws served by b. Centers that serve no
/// point carry zero mass and are left out.
inline CoresetPortion sample_portion(const WeightedPointSet& points, const Centers& centers, std::size_t t_i,
                                     double global_m_sum, std::size_t t, Objective obj, Rng& rng,
                                     std::size_t site_id = 0) {
  if (points.empty()) throw Error("sample_portion: empty site");
  detail::check_dims(points.dim(), centers.dim());

  const std::size_t n = points.size();
  std::vector<std::size_t> owner(n);
  std::vector<double> m(n);
  std::vector<double> served_mass(centers.size(), 0.0);
  std::vector<std::size_t> served_count(centers.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Nearest nearest = closest_center(points.point(i), centers);
    owner[i] = nearest.index;
    m[i] = 2.0 * std::max(points.weight(i), 0.0) * cost_from_squared(nearest.squared_distance, obj);
    served_mass[nearest.index] += points.weight(i);
    ++served_count[nearest.index];
  }

  CoresetPortion portion;
  portion.site_id = site_id;
  portion.sampled = WeightedPointSet(points.dim());
  portion.centers = WeightedPointSet(points.dim());

  std::vector<double> drawn_mass(centers.size(), 0.0);
  if (t_i > 0) {
    if (t == 0) throw Error("sample_portion: t_i > 0 with t = 0");
    const DiscreteSampler sampler(m);
    if (!(sampler.total() > 0.0)) throw Error("sample_portion: samples requested from a zero-cost site");
    portion.sampled.reserve(t_i);
    for (std::size_t draw = 0; draw < t_i; ++draw) {
      const std::size_t q = sampler(rng);
      const double w = global_m_sum / (static_cast<double>(t) * m[q]);
      portion.sampled.add(points.point(q), w);
      drawn_mass[owner[q]] += w;
    }
  }

  for (std::size_t b = 0; b < centers.size(); ++b)
    if (served_count[b] > 0) portion.centers.add(centers[b], served_mass[b] - drawn_mass[b]);
  return portion;
}

struct DistributedCoreset {
  std::vector<CoresetPortion> portions;
  CommLedger ledger;
  /// All-zero allocation when every local cost was zero or t = 0.
  SamplingPlan plan;
  std::vector<LocalSolution> local_solutions;
};

namespace detail {

inline CoresetPortion centers_only(const WeightedPointSet& points, const Centers& centers, std::size_t site_id) {
  Rng unused(0);
  return sample_portion(points, centers, 0, 0.0, 0, Objective::KMeans, unused, site_id);
}

}  // namespace detail

/// Both rounds over `sites`. Each site uses its own RNG stream derived from
/// one draw of `rng`, so the result does not depend on execution order. The
/// ledger records the Round 1 cost exchange only; moving the portions is the
/// caller's business (Communicator::share_portions).
inline DistributedCoreset build_distributed_coreset(std::span<const WeightedPointSet> sites, std::size_t k,
                                                    std::size_t t, Objective obj, Rng& rng,
                                                    const Communicator& comm, const SolverParams& params = {}) {
  if (sites.empty()) throw Error("build_distributed_coreset: no sites");
  if (comm.sites() != sites.size()) throw Error("build_distributed_coreset: communicator size differs from site count");
  for (const auto& s : sites)
    if (s.empty()) throw Error("build_distributed_coreset: every site must hold data");

  const std::size_t n = sites.size();
  const std::uint64_t base = rng();
  std::vector<Rng> streams;
  streams.reserve(n);
  for (std::size_t i = 0; i < n; ++i) streams.push_back(make_stream(base, i));

  DistributedCoreset out;
  std::vector<double> costs(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.local_solutions.push_back(local_approximation(sites[i], k, obj, streams[i], params));
    costs[i] = out.local_solutions[i].cost;
  }

  const std::vector<double> shared = comm.share_local_costs(costs, out.ledger);
  const double total_cost = std::accumulate(shared.begin(), shared.end(), 0.0);

  if (!(total_cost > 0.0) || t == 0) {
    out.plan.local_costs = shared;
    out.plan.total_cost = total_cost;
    out.plan.t = t;
    out.plan.allocation.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      out.portions.push_back(detail::centers_only(sites[i], out.local_solutions[i].centers, i));
    return out;
  }

  out.plan = make_plan(shared, t);
  const double global_m_sum = 2.0 * total_cost;
  for (std::size_t i = 0; i < n; ++i)
    out.portions.push_back(sample_portion(sites[i], out.local_solutions[i].centers, out.plan.allocation[i],
                                          global_m_sum, t, obj, streams[i], i));
  return out;
}

namespace detail {

inline CoresetPortion centralized_from_stream(const WeightedPointSet& points, std::size_t k, std::size_t t,
                                              Objective obj, Rng& stream, const SolverParams& params,
                                              std::size_t site_id) {
  if (points.empty()) throw Error("build_centralized_coreset: empty input");
  const LocalSolution local = local_approximation(points, k, obj, stream, params);
  if (!(local.cost > 0.0) || t == 0) return centers_only(points, local.centers, site_id);
  return sample_portion(points, local.centers, t, 2.0 * local.cost, t, obj, stream, site_id);
}

}  // namespace detail

/// Single-site sensitivity sampling on weighted input; identical to the
/// one-site distributed construction under the same seed.
inline CoresetPortion build_centralized_coreset(const WeightedPointSet& points, std::size_t k, std::size_t t,
                                                Objective obj, Rng& rng, const SolverParams& params = {},
                                                std::size_t site_id = 0) {
  Rng stream = make_stream(rng(), 0);
  return detail::centralized_from_stream(points, k, t, obj, stream, params, site_id);
}

}  // namespace dcoreset
