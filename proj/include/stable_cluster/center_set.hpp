#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "stable_cluster/errors.hpp"
#include "stable_cluster/geometry.hpp"

namespace stable_cluster {

// k distinct indices into X, kept in insertion order.
struct CenterSet {
  std::vector<std::size_t> ids;

  std::size_t size() const { return ids.size(); }
  bool contains(std::size_t i) const { return std::find(ids.begin(), ids.end(), i) != ids.end(); }

  void validate(std::size_t n) const {
    std::vector<char> seen(n, 0);
    for (auto i : ids) {
      if (i >= n) throw ParameterError("center index out of range");
      if (seen[i]) throw ParameterError("duplicate center index");
      seen[i] = 1;
    }
  }

  // S - out + in
  CenterSet swapped(std::size_t out, std::size_t in) const {
    CenterSet s = *this;
    for (auto& c : s.ids)
      if (c == out) c = in;
    return s;
  }

  std::vector<Point> points(const PointSet& x) const {
    std::vector<Point> out;
    out.reserve(ids.size());
    for (auto i : ids) out.push_back(x.point(i));
    return out;
  }
};

struct GonzalezResult {
  CenterSet centers;
  double radius = 0.0;
  std::vector<std::size_t> assignment;  // position in centers.ids
  std::vector<double> dist;             // distance to the assigned center
};

// Farthest-point traversal from index 0; ties go to the lower index.
inline GonzalezResult gonzalez_kcenter(const PointSet& x, std::size_t k, const MetricSpec& m) {
  const std::size_t n = x.size();
  if (n == 0) throw ParameterError("empty point set");
  if (k < 1 || k > n) throw ParameterError("k must satisfy 1 <= k <= n");
  check_metric_dim(m, x.dim());
  GonzalezResult r;
  r.assignment.assign(n, 0);
  r.dist.assign(n, std::numeric_limits<double>::infinity());
  std::vector<char> chosen(n, 0);
  std::size_t next = 0;
  for (std::size_t c = 0; c < k; ++c) {
    r.centers.ids.push_back(next);
    chosen[next] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      double d = distance(x[i], x[next], m);
      if (d < r.dist[i]) {
        r.dist[i] = d;
        r.assignment[i] = c;
      }
    }
    r.dist[next] = 0.0;
    r.assignment[next] = c;
    double far = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i] && r.dist[i] > far) {
        far = r.dist[i];
        next = i;
      }
    }
  }
  r.radius = 0.0;
  for (double d : r.dist) r.radius = std::max(r.radius, d);
  return r;
}

}  // namespace stable_cluster
