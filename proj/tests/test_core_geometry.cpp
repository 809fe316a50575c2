#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "stable_cluster/geometry.hpp"
#include "stable_cluster/point_io.hpp"
#include "test_support.hpp"

using namespace stable_cluster;

namespace {

MetricSpec axis_metric() {
  return MetricSpec::polyhedral(std::make_shared<DirectionSet>(
      2, 1.0, std::vector<double>{1, 0, 0, 1, -1, 0, 0, -1}, 0.7853981633974483, 1.0));
}

bool contains(const DirectionSet& n, std::vector<double> v) {
  for (std::size_t j = 0; j < n.size(); ++j)
    if (n[j][0] == v[0] && n[j][1] == v[1]) return true;
  return false;
}

}  // namespace

TEST(DirectionSet, AxisCaseForEpsilonOne) {
  auto n = build_direction_set(2, 1.0);
  ASSERT_EQ(n->size(), 4u);
  double s = n->scale();
  EXPECT_GE(s, 1.0);
  EXPECT_LE(s, 2.0);
  EXPECT_TRUE(contains(*n, {s, 0}));
  EXPECT_TRUE(contains(*n, {-s, 0}));
  EXPECT_TRUE(contains(*n, {0, s}));
  EXPECT_TRUE(contains(*n, {0, -s}));
  // scaled L-infinity
  MetricSpec m = MetricSpec::polyhedral(n);
  EXPECT_DOUBLE_EQ(distance(Point{0, 0}, Point{3, 4}, m), 4 * s);
}

TEST(DirectionSet, CoverageSampled) {
  auto n = build_direction_set(2, 0.05);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10000; ++t) {
    auto v = sc_test::random_unit(2, rng);
    double best = -1;
    for (std::size_t j = 0; j < n->size(); ++j)
      best = std::max(best, dot(v, (*n)[j]) / euclidean_norm((*n)[j]));
    ASSERT_GE(best, 0.95);
  }
}

TEST(DirectionSet, CoverageSampled3d) {
  for (double eps : {0.01, 0.1}) {
    auto n = build_direction_set(3, eps);
    std::mt19937_64 rng(12);
    for (int t = 0; t < 2000; ++t) {
      auto v = sc_test::random_unit(3, rng);
      double best = -1;
      for (std::size_t j = 0; j < n->size(); ++j)
        best = std::max(best, dot(v, (*n)[j]) / euclidean_norm((*n)[j]));
      ASSERT_GE(best, 1.0 - eps);
      ASSERT_GE(best, std::cos(n->covering_angle()) - 1e-12);
    }
  }
}

TEST(DirectionSet, CentralSymmetryIsExact) {
  for (std::size_t d : {1, 2, 3, 4}) {
    auto n = build_direction_set(d, d == 4 ? 0.5 : 0.1);
    for (std::size_t j = 0; j < n->size(); ++j) {
      bool found = false;
      for (std::size_t i = 0; i < n->size() && !found; ++i) {
        bool neg = true;
        for (std::size_t a = 0; a < d; ++a) neg = neg && (*n)[i][a] == -(*n)[j][a];
        found = neg;
      }
      ASSERT_TRUE(found) << "d=" << d << " j=" << j;
    }
  }
}

TEST(DirectionSet, NormsWithinBand) {
  for (std::size_t d : {2, 3})
    for (double eps : {0.01, 0.1, 0.5, 1.0}) {
      auto n = build_direction_set(d, eps);
      for (std::size_t j = 0; j < n->size(); ++j) {
        double r = euclidean_norm((*n)[j]);
        EXPECT_GE(r, 1.0);
        EXPECT_LE(r, 1.0 + eps);
      }
    }
}

TEST(DirectionSet, Deterministic) {
  auto a = detail::construct_direction_set(3, 0.1);
  auto b = detail::construct_direction_set(3, 0.1);
  EXPECT_EQ(a.flat(), b.flat());
  EXPECT_EQ(build_direction_set(2, 0.05).get(), build_direction_set(2, 0.05).get());
}

TEST(DirectionSet, RejectsBadEpsilon) {
  EXPECT_THROW(build_direction_set(2, 0.0), ParameterError);
  EXPECT_THROW(build_direction_set(2, -0.1), ParameterError);
  EXPECT_THROW(build_direction_set(2, 1.5), ParameterError);
  EXPECT_THROW(build_direction_set(0, 0.1), ParameterError);
}

TEST(Distance, Examples) {
  Point o{0, 0}, p{3, 4};
  EXPECT_DOUBLE_EQ(distance(o, p, axis_metric()), 4.0);
  EXPECT_DOUBLE_EQ(distance(o, p, MetricSpec::euclidean()), 5.0);
  EXPECT_DOUBLE_EQ(distance(o, p, MetricSpec::l1()), 7.0);
  EXPECT_DOUBLE_EQ(pair_cost(o, p, MetricSpec::euclidean(), Objective::means), 25.0);
  EXPECT_DOUBLE_EQ(pair_cost(o, p, MetricSpec::l1(), Objective::median), 7.0);
  EXPECT_DOUBLE_EQ(pair_cost(o, p, axis_metric(), Objective::center), 4.0);
}

TEST(Distance, DimensionMismatch) {
  EXPECT_THROW(distance(Point{0, 0}, Point{1, 2, 3}, MetricSpec::euclidean()), ParameterError);
  EXPECT_THROW(distance(Point{0, 0, 0}, Point{1, 2, 3}, MetricSpec::polyhedral(2, 0.1)),
               ParameterError);
}

TEST(Distance, SandwichAndSymmetry) {
  std::mt19937_64 rng(5);
  for (std::size_t d : {2, 3})
    for (double eps : {0.01, 0.1}) {
      MetricSpec m = MetricSpec::polyhedral(d, eps);
      auto x = sc_test::random_points(2000, d, rng);
      for (std::size_t i = 0; i + 1 < x.size(); i += 2) {
        double e = distance(x[i], x[i + 1], MetricSpec::euclidean());
        double p = distance(x[i], x[i + 1], m);
        ASSERT_LE(e, p);
        ASSERT_LE(p, (1.0 + eps) * e);
        ASSERT_EQ(p, distance(x[i + 1], x[i], m));
      }
      EXPECT_EQ(distance(x[0], x[0], m), 0.0);
    }
}

TEST(Distance, TriangleInequality) {
  std::mt19937_64 rng(6);
  std::vector<MetricSpec> ms{MetricSpec::euclidean(), MetricSpec::l1(), MetricSpec::polyhedral(2, 0.1)};
  auto x = sc_test::random_points(3000, 2, rng);
  for (const auto& m : ms)
    for (std::size_t i = 0; i + 2 < x.size(); i += 3) {
      double ab = distance(x[i], x[i + 1], m), bc = distance(x[i + 1], x[i + 2], m),
             ac = distance(x[i], x[i + 2], m);
      ASSERT_LE(ac, (ab + bc) * (1 + 1e-12));
    }
}

TEST(PointIo, RoundTripSeventeenDigits) {
  std::mt19937_64 rng(7);
  auto x = sc_test::random_points(50, 3, rng, -1e6, 1e6);
  std::stringstream ss;
  ss << "# x,y,z\n";
  write_points_csv(ss, x);
  auto y = parse_points_csv(ss);
  EXPECT_EQ(x.coords(), y.coords());
  EXPECT_EQ(y.dim(), 3u);
}

TEST(PointIo, MalformedInput) {
  std::stringstream a("1,2\n3\n");
  EXPECT_THROW(parse_points_csv(a), IoError);
  std::stringstream b("1,abc\n");
  EXPECT_THROW(parse_points_csv(b), IoError);
  std::stringstream c("# only header\n");
  EXPECT_THROW(parse_points_csv(c), IoError);
  EXPECT_THROW(read_points_csv("/nonexistent/file.csv"), IoError);
}

TEST(PointSet, RejectsNonFinite) {
  PointSet x(2);
  EXPECT_THROW(x.push_back(Point{1.0, std::nan("")}), ParameterError);
  EXPECT_THROW(x.push_back(Point{1.0, 2.0, 3.0}), ParameterError);
}
