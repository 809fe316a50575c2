#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <list>
#include <vector>

#include "stable_cluster/errors.hpp"
#include "stable_cluster/geometry.hpp"

namespace stable_cluster {

struct EnclosingBall {
  Point center;
  double radius = 0.0;
};

namespace detail {

// Dense two-phase simplex for  max c.y  s.t.  A y = b, y >= 0, b >= 0.
// Bland's rule throughout. Also returns the row duals pi = c_B B^-1.
struct SmallLpResult {
  std::vector<double> y;
  std::vector<double> duals;
  double value = 0.0;
};

inline SmallLpResult solve_small_lp(const std::vector<std::vector<double>>& a,
                                    const std::vector<double>& b, const std::vector<double>& c) {
  const std::size_t rows = a.size();
  const std::size_t n = c.size();
  const std::size_t cols = n + rows + 1;  // structural, artificial, rhs
  const std::size_t rhs = cols - 1;
  std::vector<std::vector<double>> t(rows, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(rows);
  double scale = 1.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::abs(v));
  const double tol = 1e-11 * scale;
  double bmax = 1.0;
  for (double v : b) bmax = std::max(bmax, std::abs(v));
  const double rhs_tol = 1e-13 * bmax;
  for (std::size_t i = 0; i < rows; ++i) {
    double sign = b[i] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = sign * a[i][j];
    t[i][n + i] = 1.0;
    t[i][rhs] = sign * b[i];
    basis[i] = n + i;
  }

  auto pivot = [&](std::size_t pr, std::size_t pc) {
    double p = t[pr][pc];
    for (double& v : t[pr]) v /= p;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == pr) continue;
      double f = t[i][pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[pr][j];
    }
    // degenerate rows must stay exactly zero or Bland's rule can cycle
    for (std::size_t i = 0; i < rows; ++i)
      if (std::abs(t[i][rhs]) < rhs_tol) t[i][rhs] = 0.0;
    basis[pr] = pc;
  };

  auto run = [&](const std::vector<double>& cost, std::size_t enter_limit) {
    double cmax = 1.0;
    for (double v : cost) cmax = std::max(cmax, std::abs(v));
    const double rc_tol = tol * cmax;  // reduced costs carry noise relative to the cost scale
    for (std::size_t iter = 0; iter < 50000; ++iter) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < enter_limit; ++j) {
        double rc = cost[j];
        for (std::size_t i = 0; i < rows; ++i) rc -= cost[basis[i]] * t[i][j];
        if (rc > rc_tol) {
          enter = j;
          break;
        }
      }
      if (enter == cols) return;
      std::size_t leave = rows;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < rows; ++i) {
        if (t[i][enter] <= tol) continue;
        double ratio = t[i][rhs] / t[i][enter];
        if (leave == rows || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == rows) throw InfeasibleError("linear program is unbounded");
      pivot(leave, enter);
    }
    throw BudgetError("simplex iteration limit reached");
  };

  std::vector<double> phase1(cols - 1, 0.0);
  for (std::size_t i = 0; i < rows; ++i) phase1[n + i] = -1.0;
  run(phase1, n + rows);
  double infeas = 0.0;
  for (std::size_t i = 0; i < rows; ++i)
    if (basis[i] >= n) infeas += t[i][rhs];
  if (infeas > 1e-9 * scale) throw InfeasibleError("linear program is infeasible");
  for (std::size_t i = 0; i < rows; ++i) {
    if (basis[i] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(t[i][j]) > tol) {
        pivot(i, j);
        break;
      }
    }
  }
  std::vector<double> phase2(cols - 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
  run(phase2, n);

  SmallLpResult out;
  out.y.assign(n, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    if (basis[i] < n) out.y[basis[i]] = t[i][rhs];
  for (std::size_t j = 0; j < n; ++j) out.value += c[j] * out.y[j];
  out.duals.assign(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t i = 0; i < rows; ++i) out.duals[r] += phase2[basis[i]] * t[i][n + r];
  return out;
}

}  // namespace detail

// Smallest ball of the gauge max_u <., u> containing every point whose
// support values are  max_p <p,u> = support[j].  Solved as the dual LP
//   max sum_u y_u M_u  s.t.  sum_u y_u u = 0,  sum_u y_u = 1,  y >= 0
// whose row duals are the center and the radius.
inline EnclosingBall polyhedral_enclosing_ball(const std::vector<double>& family, std::size_t d,
                                               const std::vector<double>& support) {
  const std::size_t m = family.size() / d;
  if (m == 0 || support.size() != m) throw ParameterError("support vector size mismatch");
  std::vector<std::vector<double>> a(d + 1, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t r = 0; r < d; ++r) a[r][j] = family[j * d + r];
    a[d][j] = 1.0;
  }
  std::vector<double> b(d + 1, 0.0);
  b[d] = 1.0;
  auto lp = detail::solve_small_lp(a, b, support);
  EnclosingBall ball;
  ball.center.assign(lp.duals.begin(), lp.duals.begin() + static_cast<std::ptrdiff_t>(d));
  // exact radius of the ball at this center
  double r = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    double v = support[j];
    for (std::size_t a2 = 0; a2 < d; ++a2) v -= ball.center[a2] * family[j * d + a2];
    r = std::max(r, v);
  }
  ball.radius = std::max(r, 0.0);
  return ball;
}

namespace detail {

class MoveToFrontBall {
 public:
  MoveToFrontBall(const PointSet& x, const std::vector<std::size_t>& idx)
      : x_(x), d_(x.dim()), pts_(idx.begin(), idx.end()) {}

  EnclosingBall run() {
    center_.assign(d_, 0.0);
    r2_ = -1.0;
    mtf(pts_.end());
    EnclosingBall out;
    out.center = center_;
    double r = 0.0;
    for (auto i : pts_) r = std::max(r, distance(x_[i], center_, MetricSpec::euclidean()));
    out.radius = r;
    return out;
  }

 private:
  bool outside(std::size_t i) const {
    if (r2_ < 0) return true;
    double s = 0.0;
    for (std::size_t a = 0; a < d_; ++a) {
      double v = x_.coord(i, a) - center_[a];
      s += v * v;
    }
    return s > r2_ * (1.0 + 1e-12) + 1e-300;
  }

  bool ball_from_support() {
    const std::size_t k = support_.size();
    if (k == 0) {
      r2_ = -1.0;
      return true;
    }
    PointView p0 = x_[support_[0]];
    if (k == 1) {
      center_.assign(p0.begin(), p0.end());
      r2_ = 0.0;
      return true;
    }
    const std::size_t m = k - 1;
    std::vector<std::vector<double>> v(m, std::vector<double>(d_));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t a = 0; a < d_; ++a) v[i][a] = x_.coord(support_[i + 1], a) - p0[a];
    std::vector<std::vector<double>> g(m, std::vector<double>(m + 1));
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) g[i][j] = 2.0 * dot(v[i], v[j]);
      g[i][m] = dot(v[i], v[i]);
      scale = std::max(scale, g[i][i]);
    }
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < m; ++r)
        if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
      if (std::abs(g[piv][col]) <= 1e-14 * scale) return false;
      std::swap(g[piv], g[col]);
      for (std::size_t r = 0; r < m; ++r) {
        if (r == col) continue;
        double f = g[r][col] / g[col][col];
        for (std::size_t j = col; j <= m; ++j) g[r][j] -= f * g[col][j];
      }
    }
    center_.assign(p0.begin(), p0.end());
    for (std::size_t i = 0; i < m; ++i) {
      double lam = g[i][m] / g[i][i];
      for (std::size_t a = 0; a < d_; ++a) center_[a] += lam * v[i][a];
    }
    r2_ = 0.0;
    for (std::size_t a = 0; a < d_; ++a) r2_ += (center_[a] - p0[a]) * (center_[a] - p0[a]);
    return true;
  }

  void mtf(std::list<std::size_t>::iterator end) {
    ball_from_support();
    if (support_.size() == d_ + 1) return;
    for (auto it = pts_.begin(); it != end;) {
      auto cur = it++;
      if (!outside(*cur)) continue;
      support_.push_back(*cur);
      auto saved_c = center_;
      auto saved_r2 = r2_;
      if (ball_from_support()) {
        mtf(cur);
      } else {
        center_ = saved_c;
        r2_ = saved_r2;
      }
      support_.pop_back();
      pts_.splice(pts_.begin(), pts_, cur);
    }
  }

  const PointSet& x_;
  std::size_t d_;
  std::list<std::size_t> pts_;
  std::vector<std::size_t> support_;
  Point center_;
  double r2_ = -1.0;
};

}  // namespace detail

inline EnclosingBall euclidean_enclosing_ball(const PointSet& x, const std::vector<std::size_t>& idx) {
  if (idx.empty()) throw ParameterError("enclosing ball of an empty set");
  return detail::MoveToFrontBall(x, idx).run();
}

}  // namespace stable_cluster
