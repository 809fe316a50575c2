#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "stable_cluster/dp_solver.hpp"
#include "stable_cluster/mst.hpp"
#include "stable_cluster/stability_lab.hpp"
#include "test_support.hpp"

using namespace stable_cluster;

namespace {

const double kTwoPlusRoot3 = 2.0 + std::sqrt(3.0);

const PropertyCheck& prop(const SeparationReport& r, const std::string& prefix) {
  for (const auto& p : r.properties)
    if (p.name.rfind(prefix, 0) == 0) return p;
  throw std::runtime_error("no property " + prefix);
}

std::vector<std::size_t> all_of(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST(Generator, SingleClusterVacuous) {
  auto inst = generate_stable_instance(1, 20, 2, 3.0, 1);
  EXPECT_TRUE(inst.certificate.passed);
  EXPECT_EQ(inst.certificate.proximity.certified_alpha, kInf);
  EXPECT_EQ(inst.ground_truth.labels, std::vector<std::size_t>(20, 0));
}

TEST(Generator, CertifiedAtTarget) {
  auto inst = generate_stable_instance(3, 300, 2, 6.0, 1);
  auto rep = verify_center_proximity(inst.points, inst.ground_truth, 6.0, MetricSpec::euclidean());
  EXPECT_TRUE(rep.passed);
  EXPECT_GE(rep.certified_alpha, 6.0);
  EXPECT_TRUE(verify_separation(inst.points, inst.ground_truth, 6.0, MetricSpec::euclidean()).passed);
  EXPECT_GT(inst.spread, 0.0);
  EXPECT_EQ(inst.points.size(), 300u);
}

TEST(Generator, IntraInterAtThreshold) {
  auto inst = generate_stable_instance(2, 80, 2, kTwoPlusRoot3, 2);
  auto rep = verify_separation(inst.points, inst.ground_truth, kTwoPlusRoot3, MetricSpec::euclidean());
  EXPECT_TRUE(prop(rep, "(4t)").applicable);
  EXPECT_TRUE(prop(rep, "(4t)").passed);
  EXPECT_TRUE(prop(rep, "intra").passed);
}

TEST(Generator, Deterministic) {
  auto a = generate_stable_instance(3, 50, 3, 5.0, 77);
  auto b = generate_stable_instance(3, 50, 3, 5.0, 77);
  EXPECT_EQ(a.points.coords(), b.points.coords());
  EXPECT_EQ(a.ground_truth.labels, b.ground_truth.labels);
}

TEST(Generator, Errors) {
  EXPECT_THROW(generate_stable_instance(3, 2, 2, 5.0, 1), ParameterError);
  EXPECT_THROW(generate_stable_instance(2, 10, 2, 1.0, 1), ParameterError);
  EXPECT_THROW(generate_stable_instance(0, 10, 2, 2.0, 1), ParameterError);
}

TEST(Generator, SoundnessSweep) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    double alpha = 1.5 + 0.25 * double(seed % 20);
    auto inst = generate_stable_instance(2 + seed % 4, 12 + seed % 30, 2 + seed % 2, alpha, seed);
    EXPECT_TRUE(certify(inst.points, inst.ground_truth, alpha).passed);
  }
}

TEST(CenterProximity, DegenerateCases) {
  PointSet x = PointSet::from_points({{0.0}, {1.0}});
  Clustering c;
  c.labels = {0, 1};
  c.centers = {{0.0}, {1.0}};
  auto r = verify_center_proximity(x, c, 100.0, MetricSpec::euclidean());
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.certified_alpha, kInf);
  // a point on a foreign center is a violation
  c.centers = {{1.0}, {1.0}};
  c.labels = {0, 0};
  c.centers.resize(2);
  auto bad = verify_center_proximity(x, c, 2.0, MetricSpec::euclidean());
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.coincident, 0u);
}

TEST(Separation, ThresholdFormsPass) {
  double alpha = 2.0 + std::sqrt(5.0) + 0.1;
  auto inst = generate_stable_instance(4, 120, 2, alpha, 3);
  auto rep = verify_separation(inst.points, inst.ground_truth, alpha, MetricSpec::euclidean());
  EXPECT_TRUE(rep.passed);
  EXPECT_TRUE(prop(rep, "(4t)").passed);
  EXPECT_TRUE(prop(rep, "(5t)").applicable);
  EXPECT_TRUE(prop(rep, "(5t)").passed);
}

TEST(Separation, SingletonsVacuous) {
  PointSet x = PointSet::from_points({{0, 0}, {10, 0}, {0, 10}});
  Clustering c;
  c.labels = {0, 1, 2};
  c.centers = {{0, 0}, {10, 0}, {0, 10}};
  auto rep = verify_separation(x, c, 3.0, MetricSpec::euclidean());
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(prop(rep, "(4)").worst_ratio, kInf);
}

TEST(Separation, MergedClustersFailProperty4) {
  PointSet x(2);
  Clustering c;
  for (int g = 0; g < 3; ++g)
    for (int t = 0; t < 3; ++t) {
      x.push_back(Point{20.0 * g + 0.5 * t, 0.3 * t});
      c.labels.push_back(g == 2 ? 1 : 0);
    }
  c.centers = {{10.5, 0.3}, {40.5, 0.3}};
  auto rep = verify_separation(x, c, 6.0, MetricSpec::euclidean());
  EXPECT_FALSE(prop(rep, "(4)").passed);
  EXPECT_FALSE(rep.passed);
}

TEST(Spread, Examples) {
  EXPECT_DOUBLE_EQ(spread(PointSet::from_points({{0.0}, {1.0}, {2.0}}), MetricSpec::euclidean()).spread, 2.0);
  EXPECT_DOUBLE_EQ(spread(PointSet::from_points({{0.0}, {1.0}}), MetricSpec::euclidean()).spread, 1.0);
  auto dup = spread(PointSet::from_points({{0.0}, {0.0}, {3.0}}), MetricSpec::euclidean());
  EXPECT_EQ(dup.duplicate_pairs, 1u);
  EXPECT_DOUBLE_EQ(dup.spread, 1.0);
  EXPECT_THROW(spread(PointSet::from_points({{1.0}, {1.0}}), MetricSpec::euclidean()), InfeasibleError);
  EXPECT_THROW(spread(PointSet::from_points({{1.0}}), MetricSpec::euclidean()), ParameterError);
}

TEST(Spread, RandomMatchesScanAndBound) {
  std::mt19937_64 rng(51);
  auto x = sc_test::random_points(100, 2, rng);
  double lo = 1e300, hi = 0;
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t j = 0; j < 100; ++j) {
      if (i == j) continue;
      double d = distance(x[i], x[j], MetricSpec::euclidean());
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  EXPECT_DOUBLE_EQ(spread(x, MetricSpec::euclidean()).spread, hi / lo);
  auto ub = spread_upper_bound(x);
  EXPECT_DOUBLE_EQ(ub.min_nonzero_distance, lo);
  EXPECT_GE(ub.spread, hi / lo);
}

TEST(Oracle, KEqualsNAndKEqualsOne) {
  std::mt19937_64 rng(52);
  auto x = sc_test::random_points(7, 2, rng);
  for (auto o : {Objective::median, Objective::means, Objective::center}) {
    EXPECT_EQ(brute_force_optimal(x, 7, o, MetricSpec::l1()).clustering.total_cost, 0.0);
    auto one = brute_force_optimal(x, 1, o, MetricSpec::l1());
    EXPECT_DOUBLE_EQ(one.clustering.total_cost,
                     one_cluster_direct(x, all_of(7), o, cost_metric(o, MetricSpec::l1())).cost);
  }
}

TEST(Oracle, ModesAgreeAndUnique) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto inst = generate_stable_instance(3, 12, 2, 4.5, 100 + seed);
    for (auto o : {Objective::median, Objective::means, Objective::center}) {
      auto a = brute_force_optimal(inst.points, 3, o, MetricSpec::euclidean(), OracleMode::partition);
      auto b = brute_force_optimal(inst.points, 3, o, MetricSpec::euclidean(), OracleMode::discrete_centers);
      EXPECT_TRUE(a.unique);
      EXPECT_EQ(a.clustering.labels, b.clustering.labels);
      EXPECT_EQ(a.clustering.labels, inst.ground_truth.labels);
    }
  }
}

TEST(Oracle, TieFallsBackToSmallestLabels) {
  // square: two equally good 2-clusterings
  PointSet x = PointSet::from_points({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  auto r = brute_force_optimal(x, 2, Objective::means, MetricSpec::euclidean());
  EXPECT_FALSE(r.unique);
  EXPECT_EQ(r.clustering.labels, (std::vector<std::size_t>{0, 0, 1, 1}));
}

TEST(Oracle, SizeGuards) {
  std::mt19937_64 rng(53);
  auto x = sc_test::random_points(15, 2, rng);
  EXPECT_THROW(brute_force_optimal(x, 3, Objective::median, MetricSpec::l1(), OracleMode::partition),
               BudgetError);
  auto big = sc_test::random_points(200, 2, rng);
  EXPECT_THROW(brute_force_optimal(big, 5, Objective::median, MetricSpec::l1()), BudgetError);
}

TEST(Oracle, MetricChangeKeepsPartition) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto inst = generate_stable_instance(3, 12, 2, 6.0, 200 + seed);
    auto e = brute_force_optimal(inst.points, 3, Objective::median, MetricSpec::euclidean());
    auto l = brute_force_optimal(inst.points, 3, Objective::median, MetricSpec::l1());
    EXPECT_EQ(e.clustering.labels, l.clustering.labels);
  }
}

TEST(Perturbation, IdentityAndRandomTrials) {
  auto inst = generate_stable_instance(3, 12, 2, 6.0, 300);
  auto id = perturbation_trial(inst, 1.0, 5, 1);
  EXPECT_EQ(id.failures, 0u);
  EXPECT_TRUE(id.adversarial_passed);
  EXPECT_EQ(id.reference_labels, inst.ground_truth.labels);
  auto rep = perturbation_trial(inst, 6.0, 100, 2);
  EXPECT_EQ(rep.trials, 100u);
  EXPECT_EQ(rep.failures, 0u);
  EXPECT_TRUE(rep.adversarial_passed);
}

TEST(MstSeparation, RootSplitRespectsClusters) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = generate_stable_instance(2 + seed % 4, 40, 2 + seed % 2, kTwoPlusRoot3, 400 + seed);
    auto tree = build_merge_tree(minimum_spanning_tree(inst.points, MetricSpec::euclidean()));
    const auto& root = tree.nodes[tree.root];
    const auto& gt = inst.ground_truth.labels;
    EXPECT_NE(gt[root.split_edge->i], gt[root.split_edge->j]);
    std::vector<int> side(inst.points.size(), -1);
    for (int s = 0; s < 2; ++s)
      for (auto p : tree.members(root.children[s])) side[p] = s;
    for (std::size_t a = 0; a < gt.size(); ++a)
      for (std::size_t b = 0; b < gt.size(); ++b)
        if (gt[a] == gt[b]) ASSERT_EQ(side[a], side[b]);
  }
}

TEST(DpVersusOracle, TwelvePointsThreeGroups) {
  auto inst = generate_stable_instance(3, 12, 2, 6.0, 500);
  for (auto o : {Objective::median, Objective::means, Objective::center}) {
    for (const auto& m : {MetricSpec::euclidean(), MetricSpec::l1(), MetricSpec::polyhedral(2, 0.05)}) {
      auto dp = solve_dp(inst.points, 3, o, m);
      auto oracle = brute_force_optimal(inst.points, 3, o, m);
      EXPECT_EQ(dp.clustering.labels, oracle.clustering.labels);
      EXPECT_NEAR(dp.clustering.total_cost, oracle.clustering.total_cost,
                  1e-9 * oracle.clustering.total_cost);
    }
  }
}
