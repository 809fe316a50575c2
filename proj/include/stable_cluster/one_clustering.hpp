#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "stable_cluster/dominance_index.hpp"
#include "stable_cluster/enclosing.hpp"
#include "stable_cluster/errors.hpp"
#include "stable_cluster/geometry.hpp"

namespace stable_cluster {

struct OneClusterResult {
  double cost = 0.0;
  Point center;
  std::optional<std::size_t> center_index;  // set for discrete (median) centers
};

// Sums are kept relative to the first inserted point to limit cancellation.
class MeanAccumulator {
 public:
  explicit MeanAccumulator(std::size_t dim) : origin_(dim, 0.0), sum_(dim, 0.0) {}

  void insert(PointView p) {
    if (p.size() != origin_.size()) throw ParameterError("dimension mismatch on insert");
    if (count_ == 0) origin_.assign(p.begin(), p.end());
    double s = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
      double v = p[a] - origin_[a];
      sum_[a] += v;
      s += v * v;
    }
    sq_ += s;
    ++count_;
  }

  std::size_t count() const { return count_; }

  Point vec_sum() const {
    Point out(sum_.size());
    for (std::size_t a = 0; a < sum_.size(); ++a)
      out[a] = sum_[a] + static_cast<double>(count_) * origin_[a];
    return out;
  }

  double sq_sum() const {
    double s = sq_;
    for (std::size_t a = 0; a < sum_.size(); ++a)
      s += 2.0 * origin_[a] * sum_[a] + static_cast<double>(count_) * origin_[a] * origin_[a];
    return s;
  }

  Point centroid() const {
    if (count_ == 0) throw ParameterError("centroid of an empty accumulator");
    Point c(sum_.size());
    for (std::size_t a = 0; a < sum_.size(); ++a)
      c[a] = origin_[a] + sum_[a] / static_cast<double>(count_);
    return c;
  }

  double cost() const {
    if (count_ == 0) throw ParameterError("1-mean cost of an empty accumulator");
    double s2 = 0.0;
    for (double v : sum_) s2 += v * v;
    return std::max(0.0, sq_ - s2 / static_cast<double>(count_));
  }

 private:
  Point origin_;
  Point sum_;
  double sq_ = 0.0;
  std::size_t count_ = 0;
};

inline double cost_1mean(const MeanAccumulator& acc) { return acc.cost(); }

// Per-direction extremes of <p,u>. The family is {(1,1), (-1,1)} for planar L1
// and the direction set for polyhedral metrics (sign vectors for L1 in d != 2).
// The Euclidean metric keeps its members and runs a minimum enclosing ball.
class CenterAccumulator {
 public:
  struct Extreme {
    double max = -std::numeric_limits<double>::infinity();
    double min = std::numeric_limits<double>::infinity();
    std::size_t argmax = 0, argmin = 0;
  };

  CenterAccumulator(const PointSet& x, const MetricSpec& m) : x_(&x), metric_(m) {
    check_metric_dim(m, x.dim());
    if (m.kind == MetricKind::l1 && x.dim() == 2) {
      family_ = {1, 1, -1, 1};
      planar_l1_ = true;
    } else if (m.kind != MetricKind::euclidean) {
      family_ = direction_family(m, x.dim());
    }
    extremes_.resize(family_.size() / x.dim());
  }

  void insert(std::size_t idx) {
    PointView p = (*x_)[idx];
    const std::size_t d = x_->dim();
    for (std::size_t j = 0; j < extremes_.size(); ++j) {
      double v = dot(p, {family_.data() + j * d, d});
      auto& e = extremes_[j];
      if (v > e.max || (v == e.max && idx < e.argmax)) {
        e.max = v;
        e.argmax = idx;
      }
      if (v < e.min || (v == e.min && idx < e.argmin)) {
        e.min = v;
        e.argmin = idx;
      }
    }
    if (metric_.kind == MetricKind::euclidean) members_.push_back(idx);
    ++count_;
  }

  std::size_t count() const { return count_; }
  const std::vector<Extreme>& extremes() const { return extremes_; }

  // Distinct points realizing some extreme.
  std::vector<std::size_t> extreme_points() const {
    std::vector<std::size_t> out;
    for (const auto& e : extremes_) {
      out.push_back(e.argmax);
      out.push_back(e.argmin);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  EnclosingBall ball() const {
    if (count_ == 0) throw ParameterError("1-center cost of an empty accumulator");
    if (metric_.kind == MetricKind::euclidean) return euclidean_enclosing_ball(*x_, members_);
    if (planar_l1_) {
      const auto& ep = extremes_[0];
      const auto& em = extremes_[1];
      double a = 0.5 * (ep.max + ep.min), b = 0.5 * (em.max + em.min);
      EnclosingBall out;
      out.center = {0.5 * (a - b), 0.5 * (a + b)};
      out.radius = 0.5 * std::max(ep.max - ep.min, em.max - em.min);
      return out;
    }
    std::vector<double> support(extremes_.size());
    for (std::size_t j = 0; j < extremes_.size(); ++j) support[j] = extremes_[j].max;
    return polyhedral_enclosing_ball(family_, x_->dim(), support);
  }

  double cost() const { return ball().radius; }

 private:
  const PointSet* x_;
  MetricSpec metric_;
  std::vector<double> family_;
  bool planar_l1_ = false;
  std::vector<Extreme> extremes_;
  std::vector<std::size_t> members_;
  std::size_t count_ = 0;
};

inline double cost_1center(const CenterAccumulator& acc) { return acc.cost(); }

// Evaluates F(x) = sum_p delta(x, p). For planar L1/polyhedral metrics the
// plane around x is cut into cones C_i, one per direction u_i, where
// delta(x,p) = <p - x, u_i>; each cone keeps a dominance index over the two
// bounding rotated coordinates. Other metrics sum directly over members.
class MedianStructure {
 public:
  MedianStructure(const PointSet& x, const MetricSpec& m) : x_(&x), metric_(m) {
    check_metric_dim(m, x.dim());
    if (x.dim() == 2 && m.kind != MetricKind::euclidean) setup_cones();
  }

  bool uses_cones() const { return !dirs_.empty(); }

  void insert(std::size_t idx) {
    PointView p = (*x_)[idx];
    if (members_.empty()) origin_.assign(p.begin(), p.end());
    members_.push_back(idx);
    if (!uses_cones()) return;
    const std::size_t r = dirs_.size();
    const double px = p[0] - origin_[0], py = p[1] - origin_[1];
    for (std::size_t j = 0; j < r; ++j) t_buf_[j] = rot(j, px, py);
    for (std::size_t i = 0; i < r; ++i) {
      double w = px * dirs_[i][0] + py * dirs_[i][1];
      cones_[i].insert(t_buf_[(i + r - 1) % r], t_buf_[i], w);
    }
  }

  std::size_t count() const { return members_.size(); }
  const std::vector<std::size_t>& members() const { return members_; }

  // Count of members in each cone around q (diagnostic).
  std::vector<std::size_t> cone_counts(PointView q) const {
    std::vector<std::size_t> out;
    for_each_cone(q, [&](std::size_t, const CountSum& cs, double) { out.push_back(cs.count); });
    return out;
  }

  double evaluate(PointView q) const {
    if (q.size() != x_->dim()) throw ParameterError("dimension mismatch in median evaluation");
    if (!uses_cones()) {
      double s = 0.0;
      for (auto i : members_) s += distance(q, (*x_)[i], metric_);
      return s;
    }
    double s = 0.0;
    for_each_cone(q, [&](std::size_t, const CountSum& cs, double qu) {
      s += cs.sum - static_cast<double>(cs.count) * qu;
    });
    return std::max(s, 0.0);
  }

  // Minimum of F over the candidate members; ties go to the lowest index.
  OneClusterResult cost_1median(const std::vector<std::size_t>& candidates) const {
    if (candidates.empty()) throw ParameterError("empty candidate set");
    OneClusterResult best;
    best.cost = std::numeric_limits<double>::infinity();
    for (auto c : candidates) {
      double f = evaluate((*x_)[c]);
      if (f < best.cost || (f == best.cost && c < *best.center_index)) {
        best.cost = f;
        best.center_index = c;
      }
    }
    best.center = x_->point(*best.center_index);
    return best;
  }

  OneClusterResult cost_1median() const { return cost_1median(members_); }

 private:
  void setup_cones() {
    auto fam = direction_family(metric_, 2);
    std::vector<std::array<double, 2>> dirs;
    for (std::size_t j = 0; j < fam.size() / 2; ++j) dirs.push_back({fam[2 * j], fam[2 * j + 1]});
    std::sort(dirs.begin(), dirs.end(), [](const auto& a, const auto& b) {
      return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]);
    });
    // Cones need equal-norm directions with angular gaps below pi.
    const double n0 = std::hypot(dirs[0][0], dirs[0][1]);
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      const auto& a = dirs[j];
      const auto& b = dirs[(j + 1) % dirs.size()];
      if (std::abs(std::hypot(a[0], a[1]) - n0) > 1e-12 * n0) return;
      if (a[0] * b[1] - a[1] * b[0] <= 0.0) return;
    }
    dirs_ = dirs;
    const std::size_t r = dirs_.size();
    bis_.resize(r);
    for (std::size_t j = 0; j < r; ++j) {
      const auto& b = dirs_[(j + 1) % r];
      bis_[j] = {dirs_[j][0] + b[0], dirs_[j][1] + b[1]};
    }
    cones_.assign(r, DominanceIndex());
    t_buf_.assign(r, 0.0);
  }

  double rot(std::size_t j, double px, double py) const { return bis_[j][0] * py - bis_[j][1] * px; }

  // Cone i is bounded below by bisector i-1 and above by bisector i. Cone 0 is
  // closed on both sides, the last cone open on both, the rest open below and
  // closed above, so a boundary point lands in the lower-indexed cone.
  template <class F>
  void for_each_cone(PointView q, F&& f) const {
    const std::size_t r = dirs_.size();
    const double qx = q[0] - (members_.empty() ? 0.0 : origin_[0]);
    const double qy = q[1] - (members_.empty() ? 0.0 : origin_[1]);
    std::vector<double> t(r);
    for (std::size_t j = 0; j < r; ++j) t[j] = rot(j, qx, qy);
    for (std::size_t i = 0; i < r; ++i) {
      bool lower_open = i != 0;
      bool upper_open = i == r - 1;
      CountSum cs = cones_[i].query(t[(i + r - 1) % r], lower_open, t[i], upper_open);
      f(i, cs, qx * dirs_[i][0] + qy * dirs_[i][1]);
    }
  }

  const PointSet* x_;
  MetricSpec metric_;
  Point origin_;
  std::vector<std::size_t> members_;
  std::vector<std::array<double, 2>> dirs_;
  std::vector<std::array<double, 2>> bis_;
  std::vector<DominanceIndex> cones_;
  std::vector<double> t_buf_;
};

inline OneClusterResult cost_1median(const MedianStructure& s, const std::vector<std::size_t>& cand) {
  return s.cost_1median(cand);
}

// Accumulator used by the dynamic program; keeps its member list so the
// smaller side can be replayed into the larger one.
class OneClusterAccumulator {
 public:
  OneClusterAccumulator(const PointSet& x, Objective o, const MetricSpec& m)
      : x_(&x), objective_(o) {
    switch (o) {
      case Objective::means: state_.emplace<MeanAccumulator>(x.dim()); break;
      case Objective::center: state_.emplace<CenterAccumulator>(x, m); break;
      case Objective::median: state_.emplace<MedianStructure>(x, m); break;
    }
  }

  void insert(std::size_t idx) {
    members_.push_back(idx);
    if (auto* a = std::get_if<MeanAccumulator>(&state_)) a->insert((*x_)[idx]);
    else if (auto* c = std::get_if<CenterAccumulator>(&state_)) c->insert(idx);
    else std::get<MedianStructure>(state_).insert(idx);
  }

  // Replays other's members into this one; returns how many were inserted.
  std::size_t absorb(const OneClusterAccumulator& other) {
    for (auto i : other.members_) insert(i);
    return other.members_.size();
  }

  std::size_t size() const { return members_.size(); }
  const std::vector<std::size_t>& members() const { return members_; }

  OneClusterResult solve() const {
    OneClusterResult r;
    if (auto* a = std::get_if<MeanAccumulator>(&state_)) {
      r.cost = a->cost();
      r.center = a->centroid();
    } else if (auto* c = std::get_if<CenterAccumulator>(&state_)) {
      auto b = c->ball();
      r.cost = b.radius;
      r.center = std::move(b.center);
    } else {
      r = std::get<MedianStructure>(state_).cost_1median();
    }
    return r;
  }

 private:
  const PointSet* x_;
  Objective objective_;
  std::vector<std::size_t> members_;
  std::variant<std::monostate, MeanAccumulator, CenterAccumulator, MedianStructure> state_;
};

// Direct evaluation of the 1-clustering conventions, independent of the
// incremental structures: two-pass centroid, enclosing ball from all members,
// and the double-loop discrete median.
inline OneClusterResult one_cluster_direct(const PointSet& x, const std::vector<std::size_t>& idx,
                                           Objective o, const MetricSpec& m) {
  if (idx.empty()) throw ParameterError("1-clustering of an empty set");
  const std::size_t d = x.dim();
  OneClusterResult r;
  if (idx.size() == 1) {
    r.center = x.point(idx[0]);
    if (o == Objective::median) r.center_index = idx[0];
    return r;
  }
  switch (o) {
    case Objective::means: {
      Point c(d, 0.0);
      for (auto i : idx)
        for (std::size_t a = 0; a < d; ++a) c[a] += x.coord(i, a);
      for (double& v : c) v /= static_cast<double>(idx.size());
      double s = 0.0;
      for (auto i : idx)
        for (std::size_t a = 0; a < d; ++a) s += (x.coord(i, a) - c[a]) * (x.coord(i, a) - c[a]);
      r.cost = s;
      r.center = std::move(c);
      return r;
    }
    case Objective::center: {
      if (m.kind == MetricKind::euclidean) {
        auto b = euclidean_enclosing_ball(x, idx);
        r.cost = b.radius;
        r.center = std::move(b.center);
        return r;
      }
      auto fam = direction_family(m, d);
      std::vector<double> support(fam.size() / d, -std::numeric_limits<double>::infinity());
      for (auto i : idx)
        for (std::size_t j = 0; j < support.size(); ++j)
          support[j] = std::max(support[j], dot(x[i], {fam.data() + j * d, d}));
      auto b = polyhedral_enclosing_ball(fam, d, support);
      r.cost = b.radius;
      r.center = std::move(b.center);
      return r;
    }
    case Objective::median: {
      r.cost = std::numeric_limits<double>::infinity();
      for (auto c : idx) {
        double s = 0.0;
        for (auto p : idx) s += distance(x[c], x[p], m);
        if (s < r.cost || (s == r.cost && c < *r.center_index)) {
          r.cost = s;
          r.center_index = c;
        }
      }
      r.center = x.point(*r.center_index);
      return r;
    }
  }
  return r;
}

}  // namespace stable_cluster
