#pragma once

// Splitting a global dataset across sites.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dcoreset/error.hpp"
#include "dcoreset/geometry.hpp"
#include "dcoreset/network.hpp"
#include "dcoreset/rng.hpp"

namespace dcoreset {

enum class PartitionKind { Uniform, SimilarityBased, Weighted, DegreeBased };

inline std::string to_string(PartitionKind kind) {
  switch (kind) {
    case PartitionKind::Uniform: return "uniform";
    case PartitionKind::SimilarityBased: return "similarity";
    case PartitionKind::Weighted: return "weighted";
    case PartitionKind::DegreeBased: return "degree";
  }
  return "uniform";
}

inline PartitionKind parse_partition_kind(std::string_view s) {
  if (s == "uniform") return PartitionKind::Uniform;
  if (s == "similarity") return PartitionKind::SimilarityBased;
  if (s == "weighted") return PartitionKind::Weighted;
  if (s == "degree") return PartitionKind::DegreeBased;
  throw Error("unknown partition scheme '" + std::string(s) + "'");
}

struct PartitionScheme {
  PartitionKind kind = PartitionKind::Uniform;
  /// Gaussian-kernel bandwidth for SimilarityBased; must be > 0 when used.
  double bandwidth = 1.0;
  /// Weighted: fixed site weights instead of drawing |N(0,1)| per site.
  std::optional<std::vector<double>> site_weights;

  static PartitionScheme uniform() { return {}; }
  static PartitionScheme similarity(double bandwidth) { return {PartitionKind::SimilarityBased, bandwidth, {}}; }
  static PartitionScheme weighted() { return {PartitionKind::Weighted, 1.0, {}}; }
  static PartitionScheme weighted(std::vector<double> w) { return {PartitionKind::Weighted, 1.0, std::move(w)}; }
  static PartitionScheme degree() { return {PartitionKind::DegreeBased, 1.0, {}}; }
};

inline constexpr std::size_t kMaxPartitionAttempts = 1000;

/// Median pairwise distance over a uniform subsample of at most
/// `sample_size` points.
inline double median_heuristic_bandwidth(const WeightedPointSet& points, Rng& rng, std::size_t sample_size = 500) {
  if (points.size() < 2) throw Error("median_heuristic_bandwidth: need at least 2 points");
  std::vector<std::size_t> idx(points.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  if (idx.size() > sample_size) {
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(sample_size);
  }
  std::vector<double> dists;
  dists.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) dists.push_back(distance(points.point(idx[a]), points.point(idx[b])));
  auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  return *mid;
}

/// Site index for every point. The whole assignment is redrawn until no site
/// is empty.
inline std::vector<std::size_t> partition_assignment(const WeightedPointSet& points, std::size_t n,
                                                     const PartitionScheme& scheme, const Topology* g, Rng& rng) {
  if (points.empty()) throw Error("partition: empty dataset");
  if (n < 2) throw Error("partition: need at least 2 sites");
  if (scheme.kind == PartitionKind::DegreeBased) {
    if (g == nullptr) throw Error("partition: degree-based scheme needs a topology");
    if (g->n() != n) throw Error("partition: topology size differs from site count");
  }
  if (scheme.kind == PartitionKind::SimilarityBased && !(scheme.bandwidth > 0.0))
    throw Error("partition: bandwidth must be > 0");
  if (scheme.site_weights && scheme.site_weights->size() != n)
    throw Error("partition: site weight count differs from site count");

  const std::size_t size = points.size();
  std::vector<std::size_t> site(size);
  std::uniform_int_distribution<std::size_t> any_point(0, size - 1);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (std::size_t attempt = 0; attempt < kMaxPartitionAttempts; ++attempt) {
    switch (scheme.kind) {
      case PartitionKind::Uniform: {
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (auto& s : site) s = pick(rng);
        break;
      }
      case PartitionKind::Weighted:
      case PartitionKind::DegreeBased: {
        std::vector<double> w(n);
        if (scheme.kind == PartitionKind::DegreeBased) {
          for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<double>(g->degree(i));
        } else if (scheme.site_weights) {
          w = *scheme.site_weights;
        } else {
          for (auto& x : w) x = std::abs(normal(rng));
        }
        const DiscreteSampler pick(w);
        for (auto& s : site) s = pick(rng);
        break;
      }
      case PartitionKind::SimilarityBased: {
        std::vector<std::size_t> anchor(n);
        for (auto& a : anchor) a = any_point(rng);
        const double scale = 2.0 * scheme.bandwidth * scheme.bandwidth;
        std::vector<double> logk(n), prob(n);
        for (std::size_t p = 0; p < size; ++p) {
          for (std::size_t i = 0; i < n; ++i)
            logk[i] = -detail::squared_distance_unchecked(points.point(p), points.point(anchor[i])) / scale;
          const double top = *std::max_element(logk.begin(), logk.end());
          for (std::size_t i = 0; i < n; ++i) prob[i] = std::exp(logk[i] - top);
          site[p] = DiscreteSampler(prob)(rng);
        }
        break;
      }
    }
    std::vector<bool> used(n, false);
    for (std::size_t s : site) used[s] = true;
    if (std::find(used.begin(), used.end(), false) == used.end()) return site;
  }
  throw Error("partition: some site stayed empty after " + std::to_string(kMaxPartitionAttempts) + " attempts");
}

/// Splits P over n sites; each point keeps its weight and relative order.
inline std::vector<WeightedPointSet> partition(const WeightedPointSet& points, std::size_t n,
                                               const PartitionScheme& scheme, const Topology* g, Rng& rng) {
  const auto site = partition_assignment(points, n, scheme, g, rng);
  std::vector<WeightedPointSet> out(n, WeightedPointSet(points.dim()));
  for (std::size_t p = 0; p < points.size(); ++p) out[site[p]].add(points.point(p), points.weight(p));
  return out;
}

}  // namespace dcoreset
