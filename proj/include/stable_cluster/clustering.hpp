#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "stable_cluster/errors.hpp"
#include "stable_cluster/geometry.hpp"
#include "stable_cluster/one_clustering.hpp"

namespace stable_cluster {

struct Clustering {
  std::vector<std::size_t> labels;
  std::vector<Point> centers;
  Objective objective = Objective::median;
  double total_cost = 0.0;
  std::vector<double> per_cluster_cost;

  std::size_t k() const { return centers.size(); }

  std::vector<std::vector<std::size_t>> clusters() const {
    std::size_t k = centers.size();
    for (auto l : labels) k = std::max(k, l + 1);
    std::vector<std::vector<std::size_t>> out(k);
    for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]].push_back(i);
    return out;
  }
};

inline double combine_costs(Objective o, const std::vector<double>& parts) {
  double s = 0.0;
  for (double c : parts) s = o == Objective::center ? std::max(s, c) : s + c;
  return s;
}

// Relabels so cluster ids follow the smallest member index; returns the
// old-to-new map.
inline std::vector<std::size_t> canonical_labels(std::vector<std::size_t>& labels) {
  std::size_t k = 0;
  for (auto l : labels) k = std::max(k, l + 1);
  std::vector<std::size_t> remap(k, std::numeric_limits<std::size_t>::max());
  std::size_t next = 0;
  for (auto& l : labels) {
    if (remap[l] == std::numeric_limits<std::size_t>::max()) remap[l] = next++;
    l = remap[l];
  }
  return remap;
}

// Partitions equal as sets of sets.
inline bool same_partition(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  if (a.size() != b.size()) return false;
  auto ca = a, cb = b;
  canonical_labels(ca);
  canonical_labels(cb);
  return ca == cb;
}

// Builds a clustering from a label vector, recomputing each cluster's
// 1-clustering center and cost by direct evaluation.
inline Clustering clustering_from_labels(const PointSet& x, std::vector<std::size_t> labels,
                                         Objective o, const MetricSpec& m) {
  canonical_labels(labels);
  Clustering c;
  c.objective = o;
  c.labels = std::move(labels);
  auto groups = c.clusters();
  const MetricSpec cm = cost_metric(o, m);
  for (const auto& g : groups) {
    if (g.empty()) throw ParameterError("empty cluster");
    auto r = one_cluster_direct(x, g, o, cm);
    c.centers.push_back(r.center);
    c.per_cluster_cost.push_back(r.cost);
  }
  c.total_cost = combine_costs(o, c.per_cluster_cost);
  return c;
}

// Cost of the given labels with the given centers, no re-optimization.
inline double recompute_cost(const PointSet& x, const std::vector<std::size_t>& labels,
                             const std::vector<Point>& centers, Objective o, const MetricSpec& m,
                             std::vector<double>* per_cluster = nullptr) {
  const MetricSpec cm = cost_metric(o, m);
  std::vector<double> parts(centers.size(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double c = pair_cost(x[i], centers[labels[i]], cm, o);
    parts[labels[i]] = o == Objective::center ? std::max(parts[labels[i]], c) : parts[labels[i]] + c;
  }
  if (per_cluster) *per_cluster = parts;
  return combine_costs(o, parts);
}

// Nearest center under the objective's metric, ties to the lowest center index.
inline std::vector<std::size_t> nearest_center_labels(const PointSet& x,
                                                      const std::vector<Point>& centers,
                                                      Objective o, const MetricSpec& m) {
  const MetricSpec cm = cost_metric(o, m);
  std::vector<std::size_t> out(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.size(); ++j) {
      double dd = distance(x[i], centers[j], cm);
      if (dd < best) {
        best = dd;
        out[i] = j;
      }
    }
  }
  return out;
}

inline bool relative_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace stable_cluster
