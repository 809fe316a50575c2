#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stable_cluster/errors.hpp"

namespace stable_cluster {

using Point = std::vector<double>;
using PointView = std::span<const double>;

enum class Objective { median, means, center };

inline std::string to_string(Objective o) {
  switch (o) {
    case Objective::median: return "median";
    case Objective::means: return "means";
    case Objective::center: return "center";
  }
  return "?";
}

inline Objective parse_objective(const std::string& s) {
  if (s == "median") return Objective::median;
  if (s == "means") return Objective::means;
  if (s == "center") return Objective::center;
  throw ParameterError("unknown objective '" + s + "'");
}

// Row-major n x d coordinate block. Indices are stable once pushed.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw ParameterError("dimension must be >= 1");
  }
  PointSet(std::size_t dim, std::vector<double> coords) : PointSet(dim) {
    if (coords.size() % dim != 0)
      throw ParameterError("coordinate count not a multiple of dimension");
    for (double c : coords)
      if (!std::isfinite(c)) throw ParameterError("non-finite coordinate");
    coords_ = std::move(coords);
  }

  static PointSet from_points(const std::vector<Point>& pts) {
    if (pts.empty()) throw ParameterError("cannot infer dimension of an empty list");
    PointSet out(pts.front().size());
    for (const auto& p : pts) out.push_back(p);
    return out;
  }

  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return coords_.empty(); }

  PointView operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  double coord(std::size_t i, std::size_t a) const { return coords_[i * dim_ + a]; }

  void push_back(PointView p) {
    if (dim_ == 0) throw ParameterError("point set has no dimension");
    if (p.size() != dim_) throw ParameterError("dimension mismatch on insert");
    for (double c : p)
      if (!std::isfinite(c)) throw ParameterError("non-finite coordinate");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }

  Point point(std::size_t i) const { return Point((*this)[i].begin(), (*this)[i].end()); }

  PointSet subset(const std::vector<std::size_t>& idx) const {
    PointSet out(dim_);
    for (auto i : idx) out.push_back((*this)[i]);
    return out;
  }

  const std::vector<double>& coords() const { return coords_; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

inline double dot(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double euclidean_norm(PointView a) { return std::sqrt(dot(a, a)); }

class DirectionSet {
 public:
  DirectionSet(std::size_t dim, double epsilon, std::vector<double> flat, double covering_angle,
               double scale)
      : dim_(dim), epsilon_(epsilon), flat_(std::move(flat)), covering_angle_(covering_angle),
        scale_(scale) {}

  std::size_t dim() const { return dim_; }
  double epsilon() const { return epsilon_; }
  std::size_t size() const { return flat_.size() / dim_; }
  PointView operator[](std::size_t i) const { return {flat_.data() + i * dim_, dim_}; }
  const std::vector<double>& flat() const { return flat_; }
  // Certified upper bound on the angle from any unit vector to its nearest direction.
  double covering_angle() const { return covering_angle_; }
  double scale() const { return scale_; }

 private:
  std::size_t dim_;
  double epsilon_;
  std::vector<double> flat_;
  double covering_angle_;
  double scale_;
};

namespace detail {

// Keeps the computed sandwich strict under rounding of individual dot products.
inline constexpr double kSandwichPad = 1e-12;

inline double target_cos(double epsilon) { return (1.0 + 2 * kSandwichPad) / (1.0 + epsilon); }

inline std::vector<double> scaled(std::vector<double> unit, double s) {
  for (double& v : unit) v *= s;
  return unit;
}

// Cell centers of a G^(d-1) grid on every face of [-1,1]^d. Only the + faces are
// generated directly; the - faces are exact negations.
inline std::vector<double> cube_face_centers(std::size_t d, std::size_t g, bool normalize) {
  std::vector<double> half;
  const double h = 2.0 / static_cast<double>(g);
  std::vector<std::size_t> idx(d - 1, 0);
  std::vector<double> v(d);
  for (std::size_t axis = 0; axis < d; ++axis) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      std::size_t t = 0;
      for (std::size_t a = 0; a < d; ++a) {
        if (a == axis) {
          v[a] = 1.0;
        } else {
          v[a] = -1.0 + h * (static_cast<double>(idx[t]) + 0.5);
          ++t;
        }
      }
      if (normalize) {
        double n = euclidean_norm(v);
        for (double& c : v) c /= n;
      }
      half.insert(half.end(), v.begin(), v.end());
      std::size_t pos = 0;
      while (pos < idx.size() && ++idx[pos] == g) idx[pos++] = 0;
      if (pos == idx.size()) break;
    }
  }
  std::vector<double> all = half;
  for (double c : half) all.push_back(-c);
  return all;
}

// Largest angle from a face sample to its nearest direction, plus the
// Lipschitz slack of the sampling grid.
inline double certify_covering(std::size_t d, const std::vector<double>& unit_dirs, double eta) {
  const double h = 2.0 * eta / std::sqrt(static_cast<double>(d - 1));
  const auto g = static_cast<std::size_t>(std::ceil(2.0 / h));
  const double h_real = 2.0 / static_cast<double>(g);
  const double eta_real = h_real * std::sqrt(static_cast<double>(d - 1)) / 2.0;
  auto samples = cube_face_centers(d, g, true);
  const std::size_t m = unit_dirs.size() / d;
  double worst = 0.0;
  for (std::size_t s = 0; s < samples.size() / d; ++s) {
    PointView v{samples.data() + s * d, d};
    double best = -2.0;
    for (std::size_t j = 0; j < m; ++j) best = std::max(best, dot(v, {unit_dirs.data() + j * d, d}));
    worst = std::max(worst, std::acos(std::clamp(best, -1.0, 1.0)));
  }
  return worst + eta_real;
}

inline std::vector<double> fibonacci_hemisphere(std::size_t m) {
  std::vector<double> half;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < m; ++i) {
    double z = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = golden * static_cast<double>(i);
    half.push_back(r * std::cos(phi));
    half.push_back(r * std::sin(phi));
    half.push_back(z);
  }
  std::vector<double> all = half;
  for (double c : half) all.push_back(-c);
  return all;
}

inline DirectionSet construct_direction_set(std::size_t d, double epsilon) {
  const double cos_target = target_cos(epsilon);
  if (d == 1) return DirectionSet(1, epsilon, {1.0, -1.0}, 0.0, 1.0);
  if (d == 2) {
    std::size_t m = 4;
    while (std::cos(std::numbers::pi / static_cast<double>(m)) < cos_target) m += 2;
    const double theta = std::numbers::pi / static_cast<double>(m);
    const double s = (1.0 + kSandwichPad) / std::cos(theta);
    std::vector<double> half;
    for (std::size_t i = 0; i < m / 2; ++i) {
      double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
      // exact zeros on the axes keep the axis case an exact scaled L-infinity
      double c = std::cos(a), sn = std::sin(a);
      if (4 * i == m) c = 0.0;
      if (i == 0) sn = 0.0;
      half.push_back(c);
      half.push_back(sn);
    }
    std::vector<double> unit = half;
    for (double c : half) unit.push_back(-c);
    return DirectionSet(2, epsilon, scaled(std::move(unit), s), theta, s);
  }
  const double theta_target = std::acos(cos_target);
  const double eta = theta_target / 4.0;
  if (d == 3) {
    auto m = static_cast<std::size_t>(std::ceil(4.0 / (theta_target * theta_target))) + 4;
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto unit = fibonacci_hemisphere(m);
      double theta = certify_covering(3, unit, eta);
      if (std::cos(theta) >= cos_target) {
        double s = (1.0 + kSandwichPad) / std::cos(theta);
        return DirectionSet(3, epsilon, scaled(std::move(unit), s), theta, s);
      }
      m = m + m / 4 + 1;
    }
    throw BudgetError("direction set densification did not converge");
  }
  // d >= 4: normalized cube-face cell centers; coverage follows from the grid pitch.
  const double h = 2.0 * theta_target / std::sqrt(static_cast<double>(d - 1));
  const auto g = static_cast<std::size_t>(std::ceil(2.0 / h));
  double count = 2.0 * static_cast<double>(d) * std::pow(static_cast<double>(g), double(d - 1));
  if (count > 2e6) throw BudgetError("direction set too large for this dimension and epsilon");
  const double h_real = 2.0 / static_cast<double>(g);
  const double theta = h_real * std::sqrt(static_cast<double>(d - 1)) / 2.0;
  double s = (1.0 + kSandwichPad) / std::cos(theta);
  return DirectionSet(d, epsilon, scaled(cube_face_centers(d, g, true), s), theta, s);
}

}  // namespace detail

// Pure in (d, epsilon); results are memoized.
inline std::shared_ptr<const DirectionSet> build_direction_set(std::size_t d, double epsilon) {
  if (d < 1) throw ParameterError("dimension must be >= 1");
  if (!(epsilon > 0.0) || !(epsilon <= 1.0))
    throw ParameterError("epsilon must lie in (0, 1]");
  static std::mutex mu;
  static std::map<std::pair<std::size_t, double>, std::shared_ptr<const DirectionSet>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d, epsilon);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto ds = std::make_shared<const DirectionSet>(detail::construct_direction_set(d, epsilon));
  cache.emplace(key, ds);
  return ds;
}

enum class MetricKind { euclidean, l1, polyhedral };

struct MetricSpec {
  MetricKind kind = MetricKind::euclidean;
  std::shared_ptr<const DirectionSet> directions;

  static MetricSpec euclidean() { return {}; }
  static MetricSpec l1() { return {MetricKind::l1, nullptr}; }
  static MetricSpec polyhedral(std::shared_ptr<const DirectionSet> n) {
    if (!n) throw ParameterError("polyhedral metric needs a direction set");
    return {MetricKind::polyhedral, std::move(n)};
  }
  static MetricSpec polyhedral(std::size_t d, double epsilon) {
    return polyhedral(build_direction_set(d, epsilon));
  }

  std::string name() const {
    switch (kind) {
      case MetricKind::euclidean: return "euclidean";
      case MetricKind::l1: return "l1";
      case MetricKind::polyhedral: return "polyhedral";
    }
    return "?";
  }
};

inline void check_metric_dim(const MetricSpec& m, std::size_t d) {
  if (m.kind == MetricKind::polyhedral && m.directions->dim() != d)
    throw ParameterError("direction set dimension does not match the point dimension");
}

inline double polyhedral_distance(PointView p, PointView q, const DirectionSet& n) {
  const std::size_t d = p.size();
  const double* u = n.flat().data();
  const std::size_t m = n.size();
  double best = -std::numeric_limits<double>::infinity();
  if (d == 2) {
    const double dx = p[0] - q[0], dy = p[1] - q[1];
    for (std::size_t j = 0; j < m; ++j) best = std::max(best, dx * u[2 * j] + dy * u[2 * j + 1]);
    return std::max(best, 0.0);
  }
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t a = 0; a < d; ++a) s += (p[a] - q[a]) * u[j * d + a];
    best = std::max(best, s);
  }
  return std::max(best, 0.0);
}

inline double distance(PointView p, PointView q, const MetricSpec& m) {
  if (p.size() != q.size()) throw ParameterError("dimension mismatch in distance");
  switch (m.kind) {
    case MetricKind::euclidean: {
      double s = 0.0;
      for (std::size_t a = 0; a < p.size(); ++a) s += (p[a] - q[a]) * (p[a] - q[a]);
      return std::sqrt(s);
    }
    case MetricKind::l1: {
      double s = 0.0;
      for (std::size_t a = 0; a < p.size(); ++a) s += std::abs(p[a] - q[a]);
      return s;
    }
    case MetricKind::polyhedral:
      if (m.directions->dim() != p.size())
        throw ParameterError("direction set dimension does not match the points");
      return polyhedral_distance(p, q, *m.directions);
  }
  return 0.0;
}

inline double pair_cost(PointView p, PointView q, const MetricSpec& m, Objective o) {
  double r = distance(p, q, m);
  return o == Objective::means ? r * r : r;
}

// Metric that governs cluster costs: means is always Euclidean.
inline MetricSpec cost_metric(Objective o, const MetricSpec& m) {
  return o == Objective::means ? MetricSpec::euclidean() : m;
}

// Directions whose max-inner-product gives the metric. For L1 these are the
// sign vectors, in counterclockwise order when d = 2.
inline std::vector<double> direction_family(const MetricSpec& m, std::size_t d) {
  if (m.kind == MetricKind::polyhedral) return m.directions->flat();
  if (m.kind != MetricKind::l1) throw ParameterError("euclidean metric has no direction family");
  if (d == 2) return {1, 1, -1, 1, -1, -1, 1, -1};
  std::vector<double> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask)
    for (std::size_t a = 0; a < d; ++a) out.push_back((mask >> a) & 1 ? -1.0 : 1.0);
  return out;
}

inline bool same_point(PointView a, PointView b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace stable_cluster
