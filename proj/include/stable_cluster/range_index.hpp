#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "stable_cluster/errors.hpp"
#include "stable_cluster/geometry.hpp"

namespace stable_cluster {

// y = slope * x + intercept, slope in {-1, 0, 1}. Membership is decided on
// key = y - slope * x, which is computed the same way everywhere.
struct SlopedLine {
  int slope = 0;
  double intercept = 0.0;

  double at(double x) const { return slope * x + intercept; }
  bool operator==(const SlopedLine&) const = default;
};

inline double line_key(int slope, double x, double y) { return y - slope * x; }

// x_lo <= x < x_hi (x <= x_hi when x_hi_closed), key_bottom >= bottom,
// key_top < top. A missing side is unbounded.
struct Trapezoid {
  double x_lo = 0.0, x_hi = 0.0;
  bool x_hi_closed = false;
  std::optional<SlopedLine> bottom, top;

  bool contains(double x, double y) const {
    if (x < x_lo) return false;
    if (x_hi_closed ? x > x_hi : x >= x_hi) return false;
    if (bottom && !(line_key(bottom->slope, x, y) >= bottom->intercept)) return false;
    if (top && !(line_key(top->slope, x, y) < top->intercept)) return false;
    return true;
  }

  void validate() const {
    if (!std::isfinite(x_lo) || !std::isfinite(x_hi) || x_lo > x_hi)
      throw ParameterError("trapezoid: bad x range");
    for (const auto& l : {bottom, top}) {
      if (l && (l->slope < -1 || l->slope > 1 || !std::isfinite(l->intercept)))
        throw ParameterError("trapezoid: edge slope must be -1, 0 or 1");
    }
    if (bottom && top) {
      for (double x : {x_lo, x_hi}) {
        double b = bottom->at(x), t = top->at(x);
        if (b - t > 1e-9 * (1.0 + std::abs(b) + std::abs(t)))
          throw ParameterError("trapezoid: bottom and top edges cross");
      }
    }
  }
};

struct RangeSums {
  std::size_t count = 0;
  double sx = 0.0, sy = 0.0;  // relative to the index origin
};

struct TrapezoidSum {
  std::size_t count = 0;
  double sum = 0.0;  // sum of <x, u>
};

// Static 3-level structure over planar points: x-order blocks, then the
// bottom-edge key, then the top-edge key with prefix sums. One copy per
// (bottom slope, top slope) pair.
class RangeIndex {
 public:
  explicit RangeIndex(const PointSet& x) : n_(x.size()) {
    if (x.dim() != 2) throw ParameterError("range index needs d = 2");
    if (n_ > std::numeric_limits<std::uint32_t>::max()) throw BudgetError("too many points");
    px_.resize(n_);
    py_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      px_[i] = x.coord(i, 0);
      py_[i] = x.coord(i, 1);
    }
    if (n_ > 0) {
      auto [xl, xh] = std::minmax_element(px_.begin(), px_.end());
      auto [yl, yh] = std::minmax_element(py_.begin(), py_.end());
      box_ = {*xl, *xh, *yl, *yh};
      origin_ = {(*xl + *xh) / 2, (*yl + *yh) / 2};
    }
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
      return px_[a] < px_[b] || (px_[a] == px_[b] && (py_[a] < py_[b] || (py_[a] == py_[b] && a < b)));
    });
    xs_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) xs_[i] = px_[order_[i]];
    levels_ = 0;
    while ((std::size_t{1} << levels_) <= n_) ++levels_;
    for (int sb = -1; sb <= 1; ++sb)
      for (int st = -1; st <= 1; ++st) build(structure(sb, st), sb, st);
  }

  std::size_t size() const { return n_; }
  // x_lo, x_hi, y_lo, y_hi
  std::array<double, 4> bounding_box() const { return box_; }
  std::array<double, 2> origin() const { return origin_; }

  RangeSums query(const Trapezoid& t) const {
    RangeSums out;
    visit(t, [&](const Layer2& l2, std::size_t s, std::size_t c) {
      if (c == 0) return;
      out.count += c;
      out.sx += l2.sx[s + c - 1];
      out.sy += l2.sy[s + c - 1];
    });
    return out;
  }

  TrapezoidSum trapezoid_sum(const Trapezoid& t, std::array<int, 2> u) const {
    auto r = query(t);
    return {r.count, u[0] * (r.sx + r.count * origin_[0]) + u[1] * (r.sy + r.count * origin_[1])};
  }

  // Point ids reported by the canonical nodes, one entry per report.
  std::vector<std::size_t> canonical_cover(const Trapezoid& t, std::size_t* nodes = nullptr) const {
    std::vector<std::size_t> ids;
    std::size_t cnt = 0;
    visit(t, [&](const Layer2& l2, std::size_t s, std::size_t c) {
      ++cnt;
      for (std::size_t i = s; i < s + c; ++i) ids.push_back(l2.id[i]);
    });
    if (nodes) *nodes = cnt;
    return ids;
  }

 private:
  struct Layer2 {
    std::vector<double> kt;
    std::vector<double> sx, sy;  // prefix sums restarting at each block
    std::vector<std::uint32_t> id;
  };
  struct Layer1 {
    std::vector<double> kb;
    std::vector<std::uint32_t> id;
    std::vector<Layer2> sub;  // one per level <= this level
  };
  struct Structure {
    int sb = 0, st = 0;
    std::vector<Layer1> layers;
  };

  Structure& structure(int sb, int st) { return s_[(sb + 1) * 3 + (st + 1)]; }
  const Structure& structure(int sb, int st) const { return s_[(sb + 1) * 3 + (st + 1)]; }

  void build(Structure& s, int sb, int st) {
    s.sb = sb;
    s.st = st;
    s.layers.resize(levels_);
    for (std::size_t l = 0; l < levels_; ++l) {
      const std::size_t w = std::size_t{1} << l;
      Layer1& L = s.layers[l];
      L.kb.assign(n_, 0.0);
      L.id.assign(n_, 0);
      const std::size_t full = n_ / w * w;
      for (std::size_t b = 0; b < full; b += w) {
        std::vector<std::uint32_t> blk(order_.begin() + b, order_.begin() + b + w);
        std::sort(blk.begin(), blk.end(), [&](std::uint32_t a, std::uint32_t c) {
          double ka = line_key(sb, px_[a], py_[a]), kc = line_key(sb, px_[c], py_[c]);
          return ka < kc || (ka == kc && a < c);
        });
        for (std::size_t i = 0; i < w; ++i) {
          L.id[b + i] = blk[i];
          L.kb[b + i] = line_key(sb, px_[blk[i]], py_[blk[i]]);
        }
      }
      L.sub.resize(l + 1);
      for (std::size_t m = 0; m <= l; ++m) {
        const std::size_t w2 = std::size_t{1} << m;
        Layer2& S = L.sub[m];
        S.kt.assign(n_, 0.0);
        S.sx.assign(n_, 0.0);
        S.sy.assign(n_, 0.0);
        S.id.assign(n_, 0);
        for (std::size_t b = 0; b < full; b += w2) {
          std::vector<std::uint32_t> blk(L.id.begin() + b, L.id.begin() + b + w2);
          std::sort(blk.begin(), blk.end(), [&](std::uint32_t a, std::uint32_t c) {
            double ka = line_key(st, px_[a], py_[a]), kc = line_key(st, px_[c], py_[c]);
            return ka < kc || (ka == kc && a < c);
          });
          double ax = 0.0, ay = 0.0;
          for (std::size_t i = 0; i < w2; ++i) {
            auto p = blk[i];
            ax += px_[p] - origin_[0];
            ay += py_[p] - origin_[1];
            S.id[b + i] = p;
            S.kt[b + i] = line_key(st, px_[p], py_[p]);
            S.sx[b + i] = ax;
            S.sy[b + i] = ay;
          }
        }
      }
    }
  }

  // Calls f(layer2, start, count) for every canonical node.
  template <class F>
  void visit(const Trapezoid& t, F&& f) const {
    t.validate();
    if (n_ == 0) return;
    const int sb = t.bottom ? t.bottom->slope : 0;
    const int st = t.top ? t.top->slope : 0;
    const double cb = t.bottom ? t.bottom->intercept : -std::numeric_limits<double>::infinity();
    const double ct = t.top ? t.top->intercept : std::numeric_limits<double>::infinity();
    const Structure& s = structure(sb, st);
    std::size_t lo = static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), t.x_lo) - xs_.begin());
    std::size_t hi = static_cast<std::size_t>(
        (t.x_hi_closed ? std::upper_bound(xs_.begin(), xs_.end(), t.x_hi)
                       : std::lower_bound(xs_.begin(), xs_.end(), t.x_hi)) -
        xs_.begin());
    while (lo < hi) {
      std::size_t l = 0;
      while (l + 1 < levels_ && lo % (std::size_t{2} << l) == 0 && lo + (std::size_t{2} << l) <= hi) ++l;
      const std::size_t w = std::size_t{1} << l;
      const Layer1& L = s.layers[l];
      // suffix of the block with key_b >= cb
      std::size_t pos = static_cast<std::size_t>(
          std::lower_bound(L.kb.begin() + static_cast<std::ptrdiff_t>(lo),
                           L.kb.begin() + static_cast<std::ptrdiff_t>(lo + w), cb) -
          L.kb.begin());
      const std::size_t end = lo + w;
      while (pos < end) {
        std::size_t m = 0;
        while (m < l && pos % (std::size_t{2} << m) == 0 && pos + (std::size_t{2} << m) <= end) ++m;
        const std::size_t w2 = std::size_t{1} << m;
        const Layer2& S = L.sub[m];
        auto first = S.kt.begin() + static_cast<std::ptrdiff_t>(pos);
        std::size_t c = static_cast<std::size_t>(std::lower_bound(first, first + static_cast<std::ptrdiff_t>(w2), ct) - first);
        f(S, pos, c);
        pos += w2;
      }
      lo += w;
    }
  }

  std::size_t n_ = 0;
  std::size_t levels_ = 0;
  std::vector<double> px_, py_, xs_;
  std::vector<std::uint32_t> order_;
  std::array<double, 4> box_{0, 0, 0, 0};
  std::array<double, 2> origin_{0, 0};
  std::array<Structure, 9> s_;
};

inline TrapezoidSum trapezoid_sum(const RangeIndex& idx, const Trapezoid& t, std::array<int, 2> u) {
  return idx.trapezoid_sum(t, u);
}

}  // namespace stable_cluster
