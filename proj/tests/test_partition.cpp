#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dcoreset/partition.hpp"

namespace {

using dcoreset::PartitionScheme;
using dcoreset::Rng;
using dcoreset::Topology;
using dcoreset::WeightedPointSet;

WeightedPointSet line_points(std::size_t n) {
  WeightedPointSet p(1);
  for (std::size_t i = 0; i < n; ++i) p.add(std::vector{static_cast<double>(i)}, 1.0);
  return p;
}

TEST(Partition, UniformTwoSitesConcentrates) {
  const auto p = line_points(10000);
  int inside = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(s);
    const auto sites = dcoreset::partition(p, 2, PartitionScheme::uniform(), nullptr, rng);
    const auto a = static_cast<long>(sites[0].size());
    inside += std::abs(a - 5000) <= 300;
  }
  EXPECT_GE(inside, 99);
}

TEST(Partition, ForcedWeights) {
  Rng rng(1);
  const auto p = line_points(10000);
  const auto sites = dcoreset::partition(p, 2, PartitionScheme::weighted({1.0, 3.0}), nullptr, rng);
  EXPECT_NEAR(static_cast<double>(sites[1].size()) / 10000.0, 0.75, 0.05);
}

TEST(Partition, DegreeBasedOnStar) {
  Rng rng(2);
  const std::size_t n = 6;
  std::vector<dcoreset::Edge> edges;
  for (std::size_t i = 1; i < n; ++i) edges.push_back({0, i});
  const Topology star(n, edges);
  const auto p = line_points(10000);
  const auto sites = dcoreset::partition(p, n, PartitionScheme::degree(), &star, rng);
  // Hub degree 5 of total degree 10.
  EXPECT_NEAR(static_cast<double>(sites[0].size()) / 10000.0, 0.5, 0.05);
  for (std::size_t i = 1; i < n; ++i) EXPECT_NEAR(static_cast<double>(sites[i].size()) / 10000.0, 0.1, 0.05);
}

TEST(Partition, PreservesMultisetAndOrder) {
  Rng rng(3);
  std::normal_distribution<double> g;
  WeightedPointSet p(2);
  std::uniform_real_distribution<double> w(0.5, 2.0);
  for (int i = 0; i < 500; ++i) p.add(std::vector{g(rng), static_cast<double>(i)}, w(rng));
  const Topology ring(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  for (const auto& scheme : {PartitionScheme::uniform(), PartitionScheme::similarity(1.0), PartitionScheme::weighted(),
                             PartitionScheme::degree()}) {
    const auto sites = dcoreset::partition(p, 4, scheme, &ring, rng);
    ASSERT_EQ(sites.size(), 4u);
    std::vector<std::pair<double, double>> seen;
    for (const auto& s : sites) {
      EXPECT_FALSE(s.empty());
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0) {
          EXPECT_LT(s.point(i - 1)[1], s.point(i)[1]);
        }
        seen.push_back({s.point(i)[1], s.weight(i)});
        EXPECT_EQ(s.point(i)[0], p.point(static_cast<std::size_t>(s.point(i)[1]))[0]);
      }
    }
    std::sort(seen.begin(), seen.end());
    ASSERT_EQ(seen.size(), p.size());
    for (std::size_t i = 0; i < seen.size(); ++i) {
      EXPECT_EQ(seen[i].first, static_cast<double>(i));
      EXPECT_EQ(seen[i].second, p.weight(i));
    }
  }
}

TEST(Partition, DeterministicUnderSeed) {
  const auto p = line_points(300);
  for (const auto& scheme : {PartitionScheme::uniform(), PartitionScheme::similarity(20.0), PartitionScheme::weighted()}) {
    Rng a(4), b(4);
    EXPECT_EQ(dcoreset::partition_assignment(p, 5, scheme, nullptr, a),
              dcoreset::partition_assignment(p, 5, scheme, nullptr, b));
  }
}

TEST(Partition, SimilarityKeepsNeighboursTogether) {
  // Two far-apart clumps and a small bandwidth: every site's points lie in one clump.
  WeightedPointSet p(1);
  for (int i = 0; i < 100; ++i) p.add(std::vector{0.01 * i}, 1.0);
  for (int i = 0; i < 100; ++i) p.add(std::vector{1000.0 + 0.01 * i}, 1.0);
  Rng rng(5);
  const auto sites = dcoreset::partition(p, 2, PartitionScheme::similarity(1.0), nullptr, rng);
  for (const auto& s : sites) {
    const bool low = s.point(0)[0] < 500.0;
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s.point(i)[0] < 500.0, low);
  }
}

TEST(Partition, Errors) {
  Rng rng(6);
  const auto p = line_points(10);
  EXPECT_THROW(dcoreset::partition(WeightedPointSet(1), 2, PartitionScheme::uniform(), nullptr, rng), dcoreset::Error);
  EXPECT_THROW(dcoreset::partition(p, 1, PartitionScheme::uniform(), nullptr, rng), dcoreset::Error);
  EXPECT_THROW(dcoreset::partition(p, 2, PartitionScheme::degree(), nullptr, rng), dcoreset::Error);
  EXPECT_THROW(dcoreset::partition(p, 2, PartitionScheme::similarity(0.0), nullptr, rng), dcoreset::Error);
  EXPECT_THROW(dcoreset::partition(p, 3, PartitionScheme::weighted({1.0, 1.0}), nullptr, rng), dcoreset::Error);
  // One point cannot fill two sites.
  EXPECT_THROW(dcoreset::partition(line_points(1), 2, PartitionScheme::uniform(), nullptr, rng), dcoreset::Error);
}

TEST(Partition, KindStrings) {
  using dcoreset::PartitionKind;
  for (auto kind : {PartitionKind::Uniform, PartitionKind::SimilarityBased, PartitionKind::Weighted,
                    PartitionKind::DegreeBased})
    EXPECT_EQ(dcoreset::parse_partition_kind(dcoreset::to_string(kind)), kind);
  EXPECT_THROW(dcoreset::parse_partition_kind("random"), dcoreset::Error);
}

TEST(MedianHeuristic, SmallExample) {
  Rng rng(7);
  // Pairwise distances 1, 1, 2: median 1.
  const auto p = line_points(3);
  EXPECT_DOUBLE_EQ(dcoreset::median_heuristic_bandwidth(p, rng), 1.0);
  EXPECT_GT(dcoreset::median_heuristic_bandwidth(line_points(2000), rng), 0.0);
  EXPECT_THROW(dcoreset::median_heuristic_bandwidth(line_points(1), rng), dcoreset::Error);
}

}  // namespace
