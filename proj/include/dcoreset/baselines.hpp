#pragma once

// Comparison methods: COMBINE (union of equal-size local coresets) and the
// tree merge that builds a coreset at every node over its own data plus its
// children's coresets.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dcoreset/coreset.hpp"
#include "dcoreset/error.hpp"
#include "dcoreset/geometry.hpp"
#include "dcoreset/network.hpp"
#include "dcoreset/rng.hpp"
#include "dcoreset/solvers.hpp"

namespace dcoreset {

/// floor(t_total / n) samples per site, the remainder going one each to the
/// lowest-index sites.
inline std::vector<std::size_t> equal_split(std::size_t t_total, std::size_t n) {
  if (n == 0) throw Error("equal_split: no sites");
  std::vector<std::size_t> share(n, t_total / n);
  for (std::size_t i = 0; i < t_total % n; ++i) ++share[i];
  return share;
}

/// Each site builds its own coreset of its equal share of t_total.
inline std::vector<CoresetPortion> combine(std::span<const WeightedPointSet> sites, std::size_t k,
                                           std::size_t t_total, Objective obj, Rng& rng,
                                           const SolverParams& params = {}) {
  if (sites.empty()) throw Error("combine: no sites");
  if (t_total < sites.size()) throw Error("combine: t_total must be at least the number of sites");
  const auto share = equal_split(t_total, sites.size());
  const std::uint64_t base = rng();
  std::vector<CoresetPortion> portions;
  portions.reserve(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    Rng stream = make_stream(base, i);
    portions.push_back(detail::centralized_from_stream(sites[i], k, share[i], obj, stream, params, i));
  }
  return portions;
}

/// Post-order merge: every node builds a coreset with t_node samples over its
/// raw data plus the coresets received from its children and, unless it is
/// the root, sends it one hop up. Returns the root's coreset.
inline CoresetPortion zhang_tree_merge(const RootedTree& tree, std::span<const WeightedPointSet> sites,
                                       std::size_t k, std::size_t t_node, Objective obj, Rng& rng,
                                       CommLedger& ledger, const SolverParams& params = {}) {
  if (t_node == 0) throw Error("zhang_tree_merge: t_node must be >= 1");
  if (sites.size() != tree.n()) throw Error("zhang_tree_merge: tree size differs from site count");

  const std::uint64_t base = rng();
  std::vector<CoresetPortion> built(tree.n());
  for (std::size_t node : tree.post_order()) {
    WeightedPointSet merged = sites[node];
    for (std::size_t child : tree.children(node)) merged.append(union_of(built[child]));
    Rng stream = make_stream(base, node);
    built[node] = detail::centralized_from_stream(merged, k, t_node, obj, stream, params, node);
    if (node != tree.root()) ledger.charge(node, tree.parent(node), Unit::Point, built[node].size());
  }
  return built[tree.root()];
}

}  // namespace dcoreset
