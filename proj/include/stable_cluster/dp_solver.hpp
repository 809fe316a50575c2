#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "stable_cluster/clustering.hpp"
#include "stable_cluster/errors.hpp"
#include "stable_cluster/geometry.hpp"
#include "stable_cluster/mst.hpp"
#include "stable_cluster/one_clustering.hpp"

namespace stable_cluster {

// mu[v][j-1] is the optimal cost of a j-clustering of node v's members;
// nullopt marks j > |X_v|. split[v][j-1] is the number of clusters given to
// children[0] at the minimizing split.
struct CostTable {
  std::size_t k = 0;
  Objective objective = Objective::median;
  MergeTree tree;
  std::vector<std::vector<std::optional<double>>> mu;
  std::vector<std::vector<std::size_t>> split;
  std::vector<Point> center1;
};

struct DpResult {
  Clustering clustering;
  CostTable table;
  SpanningTree mst;
  std::size_t insertions = 0;
  double mst_ms = 0.0;
  double dp_ms = 0.0;
};

inline std::optional<double> combine(Objective o, const std::optional<double>& a,
                                     const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return o == Objective::center ? std::max(*a, *b) : *a + *b;
}

inline std::size_t ceil_log2(std::size_t n) {
  std::size_t r = 0;
  while ((std::size_t{1} << r) < n) ++r;
  return r;
}

inline Clustering reconstruct(const CostTable& t, std::size_t k) {
  if (k < 1 || k > t.k) throw ParameterError("k outside the computed table");
  const auto& tree = t.tree;
  if (!t.mu[tree.root][k - 1]) throw InfeasibleError("k exceeds the number of points");
  std::vector<std::size_t> cluster_nodes;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{tree.root, k}};
  while (!stack.empty()) {
    auto [v, j] = stack.back();
    stack.pop_back();
    if (j == 1) {
      cluster_nodes.push_back(v);
      continue;
    }
    std::size_t i = t.split[v][j - 1];
    stack.push_back({tree.nodes[v].children[1], j - i});
    stack.push_back({tree.nodes[v].children[0], i});
  }
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> groups;
  for (auto v : cluster_nodes) {
    auto mem = tree.members(v);
    std::size_t lo = *std::min_element(mem.begin(), mem.end());
    groups.push_back({lo, std::move(mem)});
  }
  std::vector<std::size_t> order(groups.size());
  for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return groups[a].first < groups[b].first; });
  Clustering c;
  c.objective = t.objective;
  c.labels.assign(tree.n, 0);
  for (std::size_t lab = 0; lab < order.size(); ++lab) {
    std::size_t g = order[lab];
    for (auto p : groups[g].second) c.labels[p] = lab;
    std::size_t v = cluster_nodes[g];
    c.centers.push_back(t.center1[v]);
    c.per_cluster_cost.push_back(*t.mu[v][0]);
  }
  c.total_cost = combine_costs(t.objective, c.per_cluster_cost);
  return c;
}

// Bottom-up evaluation over an existing merge tree. Leaf accumulators are
// created lazily; at every internal node the smaller child is replayed into
// the larger child's accumulator, which is then moved to the parent.
inline DpResult solve_dp_on_tree(const PointSet& x, MergeTree tree, std::size_t k, Objective o,
                                 const MetricSpec& m) {
  const std::size_t n = x.size();
  if (k < 1) throw ParameterError("k must be >= 1");
  if (k > n) throw InfeasibleError("k exceeds the number of points");
  const MetricSpec cm = cost_metric(o, m);
  auto t0 = std::chrono::steady_clock::now();
  DpResult res;
  CostTable& t = res.table;
  t.k = k;
  t.objective = o;
  const std::size_t nodes = tree.nodes.size();
  t.mu.assign(nodes, {});
  t.split.assign(nodes, {});
  t.center1.assign(nodes, {});
  std::vector<std::optional<OneClusterAccumulator>> acc(nodes);
  auto leaf_acc = [&](std::size_t v) {
    if (!acc[v]) {
      acc[v].emplace(x, o, cm);
      acc[v]->insert(v);
    }
  };
  for (std::size_t v = 0; v < nodes; ++v) {
    const auto& node = tree.nodes[v];
    t.mu[v].assign(k, std::nullopt);
    t.split[v].assign(k, 0);
    if (node.leaf) {
      t.mu[v][0] = 0.0;
      t.center1[v] = x.point(v);
      continue;
    }
    auto [a, b] = node.children;
    if (tree.nodes[a].leaf) leaf_acc(a);
    if (tree.nodes[b].leaf) leaf_acc(b);
    std::size_t big = acc[a]->size() >= acc[b]->size() ? a : b;
    std::size_t small = big == a ? b : a;
    res.insertions += acc[big]->absorb(*acc[small]);
    acc[small].reset();
    acc[v] = std::move(acc[big]);
    acc[big].reset();
    auto one = acc[v]->solve();
    t.mu[v][0] = one.cost;
    t.center1[v] = std::move(one.center);
    const std::size_t sa = tree.nodes[a].size, sb = tree.nodes[b].size;
    for (std::size_t j = 2; j <= std::min(k, node.size); ++j) {
      std::optional<double> best;
      std::size_t arg = 0;
      std::size_t lo = j > sb ? j - sb : 1;
      std::size_t hi = std::min(j - 1, sa);
      for (std::size_t i = lo; i <= hi; ++i) {
        auto val = combine(o, t.mu[a][i - 1], t.mu[b][j - i - 1]);
        if (val && (!best || *val < *best)) {
          best = val;
          arg = i;
        }
      }
      t.mu[v][j - 1] = best;
      t.split[v][j - 1] = arg;
    }
  }
  t.tree = std::move(tree);
  if (n == 1) {
    t.center1[0] = x.point(0);
  }
  res.clustering = reconstruct(t, k);
  res.dp_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline DpResult solve_dp(const PointSet& x, std::size_t k, Objective o, const MetricSpec& m) {
  if (x.size() == 0) throw ParameterError("empty point set");
  if (k < 1) throw ParameterError("k must be >= 1");
  if (k > x.size()) throw InfeasibleError("k exceeds the number of points");
  auto t0 = std::chrono::steady_clock::now();
  auto mst = minimum_spanning_tree(x, m);
  auto tree = build_merge_tree(mst);
  double mst_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  auto res = solve_dp_on_tree(x, std::move(tree), k, o, m);
  res.mst = std::move(mst);
  res.mst_ms = mst_ms;
  return res;
}

// Default metric for "auto": means stays Euclidean; planar median/center use
// L1 once the certified margin covers the sqrt(2) distortion, polyhedral otherwise.
inline MetricSpec resolve_auto_metric(Objective o, std::size_t d, std::optional<double> certified_alpha,
                                      double epsilon = 0.05) {
  if (o == Objective::means) return MetricSpec::euclidean();
  const double l1_threshold = (2.0 + std::sqrt(3.0)) * std::numbers::sqrt2;
  if (d == 2 && certified_alpha && *certified_alpha >= l1_threshold) return MetricSpec::l1();
  return MetricSpec::polyhedral(d, epsilon);
}

}  // namespace stable_cluster
