#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "stable_cluster/coreset.hpp"
#include "stable_cluster/dp_solver.hpp"
#include "stable_cluster/stability_lab.hpp"
#include "test_support.hpp"

using namespace stable_cluster;

namespace {

bool hits_every_cluster(const Coreset& c, const Clustering& truth) {
  std::set<std::size_t> hit;
  for (auto i : c.members) hit.insert(truth.labels[i]);
  return hit.size() == truth.clusters().size();
}

}  // namespace

TEST(Coreset, SingletonReturnsItself) {
  PointSet x(2, {3, 4});
  auto c = build_multiplicative_coreset(x, 1, 1.0, MetricSpec::euclidean());
  EXPECT_EQ(c.members, std::vector<std::size_t>{0});
}

TEST(Coreset, SingleCenterRings) {
  std::mt19937_64 rng(1);
  auto x = sc_test::random_points(500, 2, rng);
  auto c = build_multiplicative_coreset(x, 1, 1.0, MetricSpec::euclidean());
  ASSERT_FALSE(c.members.empty());
  EXPECT_LT(c.members.size(), 100u);
  std::set<std::size_t> rings;
  for (std::size_t i = 0; i < c.members.size(); ++i) {
    EXPECT_LT(c.members[i], 500u);
    EXPECT_EQ(c.origin[i].depth, 0u);
    rings.insert(c.origin[i].ring);
  }
  EXPECT_GE(rings.size(), 2u);
  EXPECT_TRUE(std::is_sorted(c.members.begin(), c.members.end()));
  // smaller eps refines the grid
  auto fine = build_multiplicative_coreset(x, 1, 0.25, MetricSpec::euclidean());
  EXPECT_GT(fine.members.size(), c.members.size());
}

TEST(Coreset, DuplicatedLocations) {
  PointSet x(2);
  for (int rep = 0; rep < 5; ++rep)
    for (auto p : {std::vector<double>{0, 0}, std::vector<double>{5, 1}, std::vector<double>{-2, 7}}) x.push_back(p);
  auto c = build_multiplicative_coreset(x, 3, 1.0, MetricSpec::euclidean());
  ASSERT_EQ(c.members.size(), 3u);
  std::set<Point> locs;
  for (auto i : c.members) locs.insert(x.point(i));
  EXPECT_EQ(locs.size(), 3u);
}

TEST(Coreset, HitsEveryClusterOfTwoStableInstance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto inst = generate_stable_instance(3, 90, 2, 2.0, seed);
    auto c = build_multiplicative_coreset(inst.points, 3, 1.0, MetricSpec::euclidean());
    EXPECT_TRUE(hits_every_cluster(c, inst.ground_truth)) << seed;
  }
}

TEST(Coreset, ExpandedBallsOfRandomClusteringsCoverX) {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto inst = generate_stable_instance(3, 120, 2, 2.0 + std::sqrt(3.0), 100 + seed);
    auto c = build_multiplicative_coreset(inst.points, 3, 1.0, MetricSpec::euclidean());
    std::uniform_int_distribution<std::size_t> lab(0, 2);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::size_t> labels(c.members.size());
      for (auto& l : labels) l = lab(rng);
      double worst = 0.0;
      EXPECT_TRUE(covers_expanded(inst.points, c, labels, 3, MetricSpec::euclidean(), &worst)) << worst;
    }
  }
}

TEST(Coreset, BudgetAndParameterErrors) {
  std::mt19937_64 rng(3);
  auto x = sc_test::random_points(300, 2, rng);
  CoresetOptions tiny;
  tiny.max_size = 5;
  EXPECT_THROW(build_multiplicative_coreset(x, 2, 1.0, MetricSpec::euclidean(), tiny), BudgetError);
  EXPECT_THROW(build_multiplicative_coreset(x, 0, 1.0, MetricSpec::euclidean()), ParameterError);
  EXPECT_THROW(build_multiplicative_coreset(x, 2, 0.0, MetricSpec::euclidean()), ParameterError);
  CoresetSolveOptions few;
  few.max_subsets = 10;
  EXPECT_THROW(solve_via_coreset(x, 3, Objective::median, MetricSpec::euclidean(), few), BudgetError);
}

TEST(CoresetSolve, SingleClusterIsOneClustering) {
  std::mt19937_64 rng(4);
  auto x = sc_test::random_points(30, 2, rng);
  std::vector<std::size_t> all(30);
  for (std::size_t i = 0; i < 30; ++i) all[i] = i;
  for (auto o : {Objective::median, Objective::means, Objective::center}) {
    auto r = solve_via_coreset(x, 1, o, MetricSpec::euclidean());
    auto direct = one_cluster_direct(x, all, o, MetricSpec::euclidean());
    EXPECT_EQ(r.clustering.total_cost, direct.cost);
    EXPECT_EQ(r.subsets_evaluated, r.coreset.members.size());
  }
}

TEST(CoresetSolve, MatchesOracleOnSmallStableInstances) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto inst = generate_stable_instance(3, 14, 2, 2.0 + std::sqrt(3.0) + 0.3, 200 + seed);
    for (auto o : {Objective::median, Objective::means, Objective::center}) {
      auto r = solve_via_coreset(inst.points, 3, o, MetricSpec::euclidean());
      auto ora = brute_force_optimal(inst.points, 3, o, MetricSpec::euclidean(), OracleMode::partition);
      EXPECT_TRUE(same_partition(r.clustering.labels, ora.clustering.labels)) << seed << to_string(o);
      EXPECT_TRUE(relative_close(r.clustering.total_cost, ora.clustering.total_cost, 1e-9));
    }
  }
}

TEST(CoresetSolve, MatchesDpOnLargerInstance) {
  auto inst = generate_stable_instance(3, 500, 2, 2.0 + std::sqrt(3.0) + 0.3, 300);
  for (auto o : {Objective::median, Objective::means, Objective::center}) {
    auto r = solve_via_coreset(inst.points, 3, o, MetricSpec::euclidean());
    auto dp = solve_dp(inst.points, 3, o, MetricSpec::euclidean());
    EXPECT_TRUE(same_partition(r.clustering.labels, dp.clustering.labels)) << to_string(o);
    EXPECT_TRUE(relative_close(r.clustering.total_cost, dp.clustering.total_cost, 1e-9));
    EXPECT_EQ(static_cast<double>(r.subsets_evaluated), binomial(r.coreset.members.size(), 3));
  }
}

TEST(CoresetSolve, PolyhedralAndThreads) {
  auto inst = generate_stable_instance(3, 80, 3, 2.0 + std::sqrt(3.0) + 0.3, 400);
  auto m = MetricSpec::polyhedral(3, 0.1);
  CoresetSolveOptions one, three;
  three.threads = 3;
  auto a = solve_via_coreset(inst.points, 3, Objective::median, m, one);
  auto b = solve_via_coreset(inst.points, 3, Objective::median, m, three);
  EXPECT_EQ(a.representatives, b.representatives);
  EXPECT_EQ(a.subsets_evaluated, b.subsets_evaluated);
  EXPECT_TRUE(same_partition(a.clustering.labels, inst.ground_truth.labels));
}
