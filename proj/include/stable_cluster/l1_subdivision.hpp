#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "stable_cluster/errors.hpp"
#include "stable_cluster/range_index.hpp"

namespace stable_cluster {

using Planar = std::array<double, 2>;

struct SubdivisionCell {
  std::size_t owner = 0;     // position in the center list
  std::array<int, 2> u{1, 1};  // quadrant of the cell relative to its owner
  Trapezoid shape;
};

// Cells tile the slab [x_lo, x_hi] x R. Inside a cell, the owner is an L1
// nearest center and |x - cx| + |y - cy| = <p - c, u>.
struct PlanarSubdivision {
  std::vector<Planar> centers;
  double x_lo = 0.0, x_hi = 0.0;
  std::vector<SubdivisionCell> cells;

  std::optional<std::size_t> locate(double x, double y) const {
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (cells[i].shape.contains(x, y)) return i;
    return std::nullopt;
  }
};

namespace detail {

inline std::vector<double> critical_xs(const std::vector<Planar>& c, double lo, double hi) {
  std::vector<double> xs{lo, hi};
  auto keep = [&](double v) {
    if (v > lo && v < hi) xs.push_back(v);
  };
  for (std::size_t i = 0; i < c.size(); ++i) {
    keep(c[i][0]);
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      // |x - cx_i| - |x - cx_j| = +-|cy_i - cy_j| between the two x's
      double h = std::abs(c[i][1] - c[j][1]);
      if (h < std::abs(c[i][0] - c[j][0])) {
        keep((c[i][0] + c[j][0] + h) / 2);
        keep((c[i][0] + c[j][0] - h) / 2);
      }
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace detail

// Vertical slabs between critical x values; inside a slab the nearest-center
// structure is a stack of bands separated by lines of slope -1, 0 or 1. Each
// band is split at its owner's y. Equal pieces in adjacent slabs are merged.
inline PlanarSubdivision build_swap_subdivision(const std::vector<Planar>& centers, double x_lo,
                                                double x_hi) {
  if (centers.empty()) throw ParameterError("subdivision needs at least one center");
  if (!(x_lo <= x_hi)) throw ParameterError("bad x range");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (!std::isfinite(centers[i][0]) || !std::isfinite(centers[i][1]))
      throw ParameterError("non-finite center");
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      if (centers[i] == centers[j]) throw ParameterError("duplicate centers");
  }
  PlanarSubdivision sub;
  sub.centers = centers;
  sub.x_lo = x_lo;
  sub.x_hi = x_hi;
  const std::size_t k = centers.size();
  auto xs = detail::critical_xs(centers, x_lo, x_hi);
  const std::size_t slabs = xs.size() == 1 ? 1 : xs.size() - 1;

  std::vector<std::size_t> open;  // cells that end at the current slab boundary
  std::vector<double> a(k);
  std::vector<int> sigma(k);
  std::vector<std::size_t> vis;
  for (std::size_t s = 0; s < slabs; ++s) {
    const double lo = xs[s], hi = xs.size() == 1 ? xs[0] : xs[s + 1];
    const bool closed = s + 1 == slabs;
    const double xm = lo + (hi - lo) / 2;
    for (std::size_t c = 0; c < k; ++c) {
      sigma[c] = xm >= centers[c][0] ? 1 : -1;
      a[c] = std::abs(xm - centers[c][0]);
    }
    vis.clear();
    for (std::size_t c = 0; c < k; ++c) {
      bool hidden = false;
      for (std::size_t o = 0; o < k && !hidden; ++o) {
        if (o == c) continue;
        double via = std::abs(centers[c][1] - centers[o][1]) + a[o];
        hidden = via < a[c] || (via == a[c] && o < c);
      }
      if (!hidden) vis.push_back(c);
    }
    std::sort(vis.begin(), vis.end(), [&](std::size_t p, std::size_t q) {
      return centers[p][1] < centers[q][1] || (centers[p][1] == centers[q][1] && p < q);
    });
    auto boundary = [&](std::size_t lower, std::size_t upper) {
      const auto& c = centers[lower];
      const auto& d = centers[upper];
      return SlopedLine{(sigma[upper] - sigma[lower]) / 2,
                        (c[1] + d[1] - sigma[upper] * d[0] + sigma[lower] * c[0]) / 2};
    };
    std::vector<SubdivisionCell> pieces;
    for (std::size_t j = 0; j < vis.size(); ++j) {
      const std::size_t c = vis[j];
      std::optional<SlopedLine> below, above;
      if (j > 0) below = boundary(vis[j - 1], c);
      if (j + 1 < vis.size()) above = boundary(c, vis[j + 1]);
      const SlopedLine mid{0, centers[c][1]};
      SubdivisionCell lower{c, {sigma[c], -1}, {lo, hi, closed, below, mid}};
      SubdivisionCell upper{c, {sigma[c], 1}, {lo, hi, closed, mid, above}};
      pieces.push_back(lower);
      pieces.push_back(upper);
    }
    std::vector<std::size_t> next_open;
    for (auto& p : pieces) {
      std::optional<std::size_t> hit;
      for (auto ci : open) {
        const auto& q = sub.cells[ci];
        if (q.owner == p.owner && q.u == p.u && q.shape.bottom == p.shape.bottom &&
            q.shape.top == p.shape.top) {
          hit = ci;
          break;
        }
      }
      if (hit) {
        sub.cells[*hit].shape.x_hi = hi;
        sub.cells[*hit].shape.x_hi_closed = closed;
        next_open.push_back(*hit);
      } else {
        next_open.push_back(sub.cells.size());
        sub.cells.push_back(p);
      }
    }
    open.swap(next_open);
  }
  return sub;
}

}  // namespace stable_cluster
