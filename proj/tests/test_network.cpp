#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "dcoreset/network.hpp"

namespace {

using dcoreset::CommLedger;
using dcoreset::Edge;
using dcoreset::RootedTree;
using dcoreset::Rng;
using dcoreset::Topology;
using dcoreset::TopologyKind;
using dcoreset::TopologyParams;
using dcoreset::Unit;

Topology complete(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) edges.push_back({u, v});
  return Topology(n, edges);
}

Topology grid(std::size_t rows, std::size_t cols) {
  Rng rng(0);
  TopologyParams params;
  params.rows = rows;
  params.cols = cols;
  return dcoreset::gen_topology(TopologyKind::Grid, rows * cols, params, rng);
}

TEST(Topology, RejectsInvalidEdges) {
  EXPECT_THROW(Topology(3, {{0, 0}}), dcoreset::Error);
  EXPECT_THROW(Topology(3, {{0, 3}}), dcoreset::Error);
  EXPECT_THROW(Topology(3, {{0, 1}, {1, 0}}), dcoreset::Error);
}

TEST(GenTopology, GridThreeByThree) {
  const Topology g = grid(3, 3);
  EXPECT_EQ(g.m(), 12u);
  EXPECT_EQ(g.max_degree(), 4u);
  EXPECT_TRUE(g.is_connected());
}

TEST(GenTopology, GridAutoShapeAndPrimeError) {
  Rng rng(1);
  const Topology g = dcoreset::gen_topology(TopologyKind::Grid, 12, {}, rng);
  EXPECT_EQ(g.m(), 2u * 12 - 3 - 4);
  EXPECT_THROW(dcoreset::gen_topology(TopologyKind::Grid, 7, {}, rng), dcoreset::Error);
  TopologyParams bad;
  bad.rows = 5;
  bad.cols = 3;
  EXPECT_THROW(dcoreset::gen_topology(TopologyKind::Grid, 12, bad, rng), dcoreset::Error);
}

TEST(GenTopology, RandomFullProbabilityIsComplete) {
  Rng rng(2);
  TopologyParams params;
  params.p = 1.0;
  const Topology g = dcoreset::gen_topology(TopologyKind::Random, 10, params, rng);
  EXPECT_EQ(g.m(), 45u);
}

TEST(GenTopology, RandomIsConnectedAndSimple) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    const Topology g = dcoreset::gen_topology(TopologyKind::Random, 25, {}, rng);
    EXPECT_TRUE(g.is_connected());
    for (const Edge& e : g.edges()) EXPECT_LT(e.u, e.v);
  }
}

TEST(GenTopology, RandomRetryExhaustion) {
  Rng rng(3);
  TopologyParams params;
  params.p = 1e-6;
  EXPECT_THROW(dcoreset::gen_topology(TopologyKind::Random, 30, params, rng), dcoreset::Error);
  params.p = 0.0;
  EXPECT_THROW(dcoreset::gen_topology(TopologyKind::Random, 30, params, rng), dcoreset::Error);
}

TEST(GenTopology, Preferential) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(s);
    const Topology g = dcoreset::gen_topology(TopologyKind::Preferential, 25, {}, rng);
    EXPECT_TRUE(g.is_connected());
    EXPECT_LE(g.m(), 2u * 25);
    EXPECT_EQ(g.m(), 3u + 2u * 22);
  }
  Rng rng(4);
  TopologyParams zero;
  zero.attach = 0;
  EXPECT_THROW(dcoreset::gen_topology(TopologyKind::Preferential, 10, zero, rng), dcoreset::Error);
}

TEST(GenTopology, NeedsTwoSites) {
  Rng rng(5);
  EXPECT_THROW(dcoreset::gen_topology(TopologyKind::Random, 1, {}, rng), dcoreset::Error);
}

TEST(EdgeList, RoundTrip) {
  Rng rng(6);
  const Topology g = dcoreset::gen_topology(TopologyKind::Random, 12, {}, rng);
  std::stringstream buf;
  dcoreset::write_edge_list(buf, g);
  const Topology back = dcoreset::read_edge_list(buf);
  EXPECT_EQ(back.n(), g.n());
  EXPECT_EQ(back.edges(), g.edges());
}

TEST(EdgeList, TruncatedInputReportsLine) {
  std::istringstream in("3 2\n0 1\n");
  try {
    dcoreset::read_edge_list(in);
    FAIL() << "expected ParseError";
  } catch (const dcoreset::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(SpanningTree, Heights) {
  const Topology path(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(dcoreset::bfs_tree(path, 0).height(), 2u);
  const Topology k5 = complete(5);
  for (std::size_t r = 0; r < 5; ++r) EXPECT_EQ(dcoreset::bfs_tree(k5, r).height(), 1u);
  const Topology g = grid(5, 5);
  for (std::size_t corner : {0u, 4u, 20u, 24u}) EXPECT_EQ(dcoreset::bfs_tree(g, corner).height(), 8u);
}

TEST(SpanningTree, BfsDepthIsHopDistance) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(s);
    const Topology g = dcoreset::gen_topology(TopologyKind::Random, 20, {}, rng);
    const RootedTree t = dcoreset::spanning_tree(g, rng);
    const auto hops = g.hop_distances(t.root());
    for (std::size_t i = 0; i < g.n(); ++i) EXPECT_EQ(t.depth(i), hops[i]);
    EXPECT_EQ(t.height(), g.eccentricity(t.root()));
    EXPECT_LE(t.height(), g.n() - 1);
    EXPECT_EQ(t.parent(t.root()), RootedTree::kNoParent);
  }
}

TEST(SpanningTree, PostOrderVisitsChildrenFirst) {
  const RootedTree t = dcoreset::bfs_tree(grid(3, 4), 5);
  const auto order = t.post_order();
  ASSERT_EQ(order.size(), 12u);
  std::vector<std::size_t> position(12);
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  for (std::size_t i = 0; i < 12; ++i)
    if (i != t.root()) {
      EXPECT_LT(position[i], position[t.parent(i)]);
    }
  EXPECT_EQ(order.back(), 5u);
}

TEST(RootedTree, RejectsNonTrees) {
  constexpr auto none = RootedTree::kNoParent;
  EXPECT_THROW(RootedTree(0, {none, 2, 1}), dcoreset::Error);
  EXPECT_THROW(RootedTree(0, {1, 0}), dcoreset::Error);
  EXPECT_THROW(RootedTree(0, {none, 1}), dcoreset::Error);
}

TEST(Flood, Examples) {
  CommLedger two;
  const std::vector<std::uint64_t> ones2(2, 1);
  dcoreset::flood(Topology(2, {{0, 1}}), ones2, two);
  EXPECT_EQ(two.point_units(), 4u);

  CommLedger k3;
  const std::vector<std::uint64_t> ones3(3, 1);
  const auto record = dcoreset::flood(complete(3), ones3, k3);
  EXPECT_EQ(k3.point_units(), 18u);
  for (const auto& row : record.holds)
    for (bool held : row) EXPECT_TRUE(held);
}

TEST(Flood, TwoMTransmissionsPerItem) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng rng(s);
    const Topology g = dcoreset::gen_topology(TopologyKind::Preferential, 15, {}, rng);
    std::vector<std::uint64_t> sizes(15);
    std::uniform_int_distribution<std::uint64_t> size(0, 50);
    for (auto& x : sizes) x = size(rng);
    CommLedger ledger;
    const auto record = dcoreset::flood(g, sizes, ledger);
    EXPECT_EQ(record.transmissions, 2 * g.m() * g.n());
    EXPECT_EQ(ledger.point_units(), 2 * g.m() * std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0}));
    EXPECT_EQ(ledger.scalar_units(), 0u);
    EXPECT_LE(record.rounds, g.n());
  }
}

TEST(Flood, PerEdgeTrafficIsSymmetric) {
  const Topology g = grid(2, 3);
  const std::vector<std::uint64_t> sizes{1, 2, 3, 4, 5, 6};
  CommLedger ledger;
  dcoreset::flood(g, sizes, ledger);
  ASSERT_EQ(ledger.per_edge().size(), g.m());
  // Every edge carries every item once in each direction.
  for (const auto& [edge, traffic] : ledger.per_edge()) EXPECT_EQ(traffic.point_units, 2u * 21);
}

TEST(Flood, DisconnectedRejected) {
  CommLedger ledger;
  const std::vector<std::uint64_t> ones(4, 1);
  EXPECT_THROW(dcoreset::flood(Topology(4, {{0, 1}, {2, 3}}), ones, ledger), dcoreset::Error);
}

TEST(BroadcastScalars, Examples) {
  const std::vector<double> two{1.5, 2.5};
  CommLedger a;
  const auto known = dcoreset::broadcast_scalars(Topology(2, {{0, 1}}), two, a);
  EXPECT_EQ(a.scalar_units(), 4u);
  EXPECT_EQ(known[1], two);

  CommLedger b;
  const std::vector<double> nine(9, 1.0);
  dcoreset::broadcast_scalars(grid(3, 3), nine, b);
  EXPECT_EQ(b.scalar_units(), 216u);

  CommLedger c;
  const std::vector<double> four{1, 2, 3, 4};
  dcoreset::broadcast_scalars(complete(4), four, c);
  EXPECT_EQ(c.scalar_units(), 48u);
  EXPECT_EQ(c.point_units(), 0u);
}

TEST(TreeUpcast, Examples) {
  // Path 0-1-2-3 rooted at 0: site 3 sits at depth 3.
  const RootedTree path = dcoreset::bfs_tree(Topology(4, {{0, 1}, {1, 2}, {2, 3}}), 0);
  CommLedger leaf;
  const std::vector<std::uint64_t> only_leaf{0, 0, 0, 10};
  EXPECT_EQ(dcoreset::tree_upcast(path, only_leaf, leaf).units, 30u);
  EXPECT_EQ(leaf.point_units(), 30u);

  CommLedger root;
  const std::vector<std::uint64_t> only_root{7, 0, 0, 0};
  dcoreset::tree_upcast(path, only_root, root);
  EXPECT_EQ(root.point_units(), 0u);

  const RootedTree star = dcoreset::bfs_tree(Topology(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}), 0);
  CommLedger s;
  const std::vector<std::uint64_t> sizes{9, 1, 2, 3, 4};
  dcoreset::tree_upcast(star, sizes, s);
  EXPECT_EQ(s.point_units(), 10u);
}

TEST(TreeUpcast, DepthWeightedSumAndHeightBound) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const Topology g = dcoreset::gen_topology(TopologyKind::Random, 20, {}, rng);
    const RootedTree t = dcoreset::spanning_tree(g, rng);
    std::vector<std::uint64_t> sizes(20);
    std::uniform_int_distribution<std::uint64_t> size(0, 100);
    for (auto& x : sizes) x = size(rng);
    CommLedger ledger;
    const auto record = dcoreset::tree_upcast(t, sizes, ledger);
    std::uint64_t expected = 0, total = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      expected += t.depth(i) * sizes[i];
      total += sizes[i];
    }
    EXPECT_EQ(ledger.point_units(), expected);
    EXPECT_LE(ledger.point_units(), t.height() * total);
    EXPECT_EQ(record.delivered.size(), 20u);
  }
}

TEST(CommLedger, CombinedUnitsAndAccumulate) {
  CommLedger a;
  a.charge(0, 1, Unit::Point, 10);
  a.charge(1, 0, Unit::Scalar, 6);
  EXPECT_DOUBLE_EQ(a.combined_units(2), 12.0);
  CommLedger b;
  b.charge(2, 1, Unit::Point, 5);
  a += b;
  EXPECT_EQ(a.point_units(), 15u);
  EXPECT_EQ(a.scalar_units(), 6u);
  EXPECT_EQ(a.per_edge().size(), 2u);
  EXPECT_EQ(a.per_edge().at(Edge{0, 1}).point_units, 10u);
}

TEST(Communicators, ScalarExchangeCosts) {
  const Topology g = grid(3, 3);
  const std::vector<double> costs{1, 2, 3, 4, 5, 6, 7, 8, 9};

  CommLedger flood_ledger;
  const dcoreset::FloodingCommunicator flooding(g);
  EXPECT_EQ(flooding.share_local_costs(costs, flood_ledger), costs);
  EXPECT_EQ(flood_ledger.scalar_units(), 2u * 12 * 9);

  const RootedTree t = dcoreset::bfs_tree(g, 0);
  std::uint64_t depth_sum = 0;
  for (std::size_t i = 0; i < 9; ++i) depth_sum += t.depth(i);
  CommLedger tree_ledger;
  const dcoreset::TreeCommunicator upcast(t);
  EXPECT_EQ(upcast.share_local_costs(costs, tree_ledger), costs);
  EXPECT_EQ(tree_ledger.scalar_units(), 2 * depth_sum + 8);

  const std::vector<std::uint64_t> sizes(9, 3);
  CommLedger portions;
  upcast.share_portions(sizes, portions);
  EXPECT_EQ(portions.point_units(), 3 * depth_sum);
}

}  // namespace
