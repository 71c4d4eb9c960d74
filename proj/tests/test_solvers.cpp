#include <gtest/gtest.h>

#include <random>

#include "dcoreset/solvers.hpp"
#include "dcoreset/verify.hpp"

namespace {

using dcoreset::Centers;
using dcoreset::Objective;
using dcoreset::PointMatrix;
using dcoreset::Rng;
using dcoreset::WeightedPointSet;

WeightedPointSet four_points() {
  return WeightedPointSet::unit(PointMatrix{{0, 0}, {0, 1}, {10, 0}, {10, 1}});
}

WeightedPointSet gaussian_blobs(std::size_t per_blob, Rng& rng) {
  std::normal_distribution<double> g(0.0, 0.5);
  WeightedPointSet p(2);
  const double offsets[3][2] = {{0, 0}, {8, 0}, {0, 8}};
  for (const auto& o : offsets)
    for (std::size_t i = 0; i < per_blob; ++i) p.add(std::vector{o[0] + g(rng), o[1] + g(rng)}, 1.0);
  return p;
}

TEST(Seed, ReturnsKDistinctPointsWhenPossible) {
  Rng rng(1);
  const auto p = four_points();
  const Centers c = dcoreset::seed(p, 3, Objective::KMeans, rng);
  ASSERT_EQ(c.size(), 3u);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) EXPECT_GT(dcoreset::distance(c[i], c[j]), 0.0);
}

TEST(Seed, PadsWhenFewerDistinctPoints) {
  Rng rng(2);
  const auto p = WeightedPointSet::unit(PointMatrix{{1, 1}, {1, 1}, {1, 1}});
  const Centers c = dcoreset::seed(p, 4, Objective::KMedian, rng);
  ASSERT_EQ(c.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(dcoreset::distance(c[i], std::vector{1.0, 1.0}), 0.0);
}

TEST(Seed, RejectsBadInput) {
  Rng rng(3);
  EXPECT_THROW(dcoreset::seed(four_points(), 0, Objective::KMeans, rng), dcoreset::Error);
  EXPECT_THROW(dcoreset::seed(WeightedPointSet(2), 2, Objective::KMeans, rng), dcoreset::Error);
  WeightedPointSet neg(1);
  neg.add(std::vector{0.0}, -1.0);
  EXPECT_THROW(dcoreset::seed(neg, 1, Objective::KMeans, rng), dcoreset::Error);
}

TEST(Seed, ZeroWeightPointsNeverChosen) {
  WeightedPointSet p(1);
  p.add(std::vector{0.0}, 1.0);
  p.add(std::vector{100.0}, 0.0);
  p.add(std::vector{1.0}, 1.0);
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(s);
    const Centers c = dcoreset::seed(p, 2, Objective::KMeans, rng);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NE(c[i][0], 100.0);
  }
}

TEST(LocalApproximation, FourPointExample) {
  Rng rng(4);
  const auto sol = dcoreset::local_approximation(four_points(), 2, Objective::KMeans, rng);
  EXPECT_NEAR(sol.cost, 1.0, 1e-9);
  ASSERT_EQ(sol.centers.size(), 2u);
}

TEST(LocalApproximation, KMedianCollinearExample) {
  Rng rng(5);
  const auto p = WeightedPointSet::unit(PointMatrix{{0, 0}, {1, 0}, {5, 0}});
  const auto sol = dcoreset::local_approximation(p, 1, Objective::KMedian, rng);
  EXPECT_NEAR(sol.centers[0][0], 1.0, 1e-3);
  EXPECT_NEAR(sol.centers[0][1], 0.0, 1e-9);
  EXPECT_NEAR(sol.cost, 5.0, 1e-3);
}

TEST(LocalApproximation, WithinConstantOfOptimumOnSmallInstances) {
  Rng rng(6);
  std::normal_distribution<double> g;
  for (int inst = 0; inst < 30; ++inst) {
    WeightedPointSet p(2);
    for (int i = 0; i < 9; ++i) p.add(std::vector{g(rng), g(rng)}, 1.0);
    for (Objective obj : {Objective::KMeans, Objective::KMedian}) {
      const double opt = dcoreset::brute_force_optimal(p, 2, obj);
      const double got = dcoreset::local_approximation(p, 2, obj, rng).cost;
      EXPECT_GE(got, opt * (1 - 1e-9));
      EXPECT_LE(got, 10.0 * opt + 1e-12);
    }
  }
}

TEST(LocalApproximation, RecoversSeparatedBlobs) {
  Rng rng(7);
  const auto p = gaussian_blobs(100, rng);
  const auto sol = dcoreset::local_approximation(p, 3, Objective::KMeans, rng);
  // Per-point variance 2 * 0.25 = 0.5, so a correct clustering costs about 150.
  EXPECT_LT(sol.cost, 250.0);
}

TEST(LocalApproximation, NegativeWeightsUsePositivePart) {
  WeightedPointSet p(1);
  p.add(std::vector{0.0}, 2.0);
  p.add(std::vector{10.0}, -1.0);
  p.add(std::vector{2.0}, 2.0);
  Rng rng(8);
  const auto sol = dcoreset::local_approximation(p, 1, Objective::KMeans, rng);
  EXPECT_NEAR(sol.centers[0][0], 1.0, 1e-9);
  EXPECT_NEAR(sol.cost, 4.0, 1e-9);
}

TEST(LocalApproximation, DeterministicUnderSeed) {
  Rng a(9), b(9), data_rng(10);
  const auto p = gaussian_blobs(50, data_rng);
  for (Objective obj : {Objective::KMeans, Objective::KMedian}) {
    const auto x = dcoreset::local_approximation(p, 3, obj, a);
    const auto y = dcoreset::local_approximation(p, 3, obj, b);
    EXPECT_EQ(x.centers, y.centers);
    EXPECT_EQ(x.cost, y.cost);
  }
}

TEST(Refine, CostHistoryNonIncreasing) {
  Rng rng(11);
  const auto p = gaussian_blobs(80, rng);
  for (Objective obj : {Objective::KMeans, Objective::KMedian}) {
    for (int trial = 0; trial < 5; ++trial) {
      const Centers x0 = dcoreset::seed(p, 4, obj, rng);
      const auto r = dcoreset::refine_with_history(p, x0, obj);
      ASSERT_FALSE(r.cost_history.empty());
      EXPECT_NEAR(r.cost_history.front(), dcoreset::cost(p, x0, obj), 1e-9 * r.cost_history.front());
      for (std::size_t i = 1; i < r.cost_history.size(); ++i)
        EXPECT_LE(r.cost_history[i], r.cost_history[i - 1] * (1 + 1e-12));
      EXPECT_NEAR(r.cost_history.back(), dcoreset::cost(p, r.centers, obj), 1e-9 * r.cost_history.back() + 1e-12);
    }
  }
}

TEST(Refine, WeightedCentroid) {
  WeightedPointSet p(1);
  p.add(std::vector{0.0}, 3.0);
  p.add(std::vector{4.0}, 1.0);
  const Centers c = dcoreset::refine(p, Centers{{4.0}}, Objective::KMeans);
  EXPECT_NEAR(c[0][0], 1.0, 1e-12);
}

TEST(Refine, EmptyClusterIsReseeded) {
  const auto p = four_points();
  const Centers x0{{0, 0}, {100, 100}};
  const Centers c = dcoreset::refine(p, x0, Objective::KMeans);
  EXPECT_NEAR(dcoreset::cost(p, c, Objective::KMeans), 1.0, 1e-9);
}

TEST(SolverParams, Validation) {
  dcoreset::SolverParams params;
  EXPECT_NO_THROW(params.validate());
  params.rel_tol = 0.0;
  EXPECT_THROW(params.validate(), dcoreset::Error);
}

}  // namespace
