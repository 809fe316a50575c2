#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "stable_cluster/errors.hpp"
#include "stable_cluster/geometry.hpp"

namespace stable_cluster {

struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double w = 0.0;
};

// Total order used for every tie: (w, min endpoint, max endpoint).
inline bool edge_less(const Edge& a, const Edge& b) {
  return std::make_tuple(a.w, std::min(a.i, a.j), std::max(a.i, a.j)) <
         std::make_tuple(b.w, std::min(b.i, b.j), std::max(b.i, b.j));
}

struct SpanningTree {
  std::size_t n = 0;
  std::vector<Edge> edges;

  // Summed in edge order so equal trees give bit-equal totals.
  double total_weight() const {
    auto sorted = edges;
    std::sort(sorted.begin(), sorted.end(), edge_less);
    double s = 0.0;
    for (const auto& e : sorted) s += e.w;
    return s;
  }
};

// Dense Prim. Every weight is distance(points[min], points[max]).
inline SpanningTree dense_minimum_spanning_tree(const PointSet& x, const MetricSpec& m) {
  const std::size_t n = x.size();
  if (n == 0) throw ParameterError("minimum spanning tree of an empty point set");
  check_metric_dim(m, x.dim());
  SpanningTree t;
  t.n = n;
  if (n == 1) return t;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> key(n, inf);
  std::vector<std::size_t> parent(n, 0);
  std::vector<char> done(n, 0);
  done[0] = 1;
  for (std::size_t j = 1; j < n; ++j) key[j] = distance(x[0], x[j], m);
  t.edges.reserve(n - 1);
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    Edge best_edge;
    for (std::size_t j = 0; j < n; ++j) {
      if (done[j]) continue;
      Edge e{std::min(parent[j], j), std::max(parent[j], j), key[j]};
      if (best == n || edge_less(e, best_edge)) {
        best = j;
        best_edge = e;
      }
    }
    done[best] = 1;
    t.edges.push_back(best_edge);
    for (std::size_t j = 0; j < n; ++j) {
      if (done[j]) continue;
      double w = distance(x[std::min(best, j)], x[std::max(best, j)], m);
      Edge cand{std::min(best, j), std::max(best, j), w};
      Edge cur{std::min(parent[j], j), std::max(parent[j], j), key[j]};
      if (edge_less(cand, cur)) {
        key[j] = w;
        parent[j] = best;
      }
    }
  }
  return t;
}

namespace detail {

inline std::size_t uf_find(std::vector<std::size_t>& uf, std::size_t a) {
  while (uf[a] != a) a = uf[a] = uf[uf[a]];
  return a;
}

// Kruskal over candidate edges; returns fewer than n - 1 edges when the
// candidates do not connect the points.
inline SpanningTree kruskal(std::size_t n, std::vector<Edge> cand) {
  std::sort(cand.begin(), cand.end(), edge_less);
  std::vector<std::size_t> uf(n);
  std::iota(uf.begin(), uf.end(), 0);
  SpanningTree t;
  t.n = n;
  for (const auto& e : cand) {
    std::size_t a = uf_find(uf, e.i), b = uf_find(uf, e.j);
    if (a == b) continue;
    uf[b] = a;
    t.edges.push_back(e);
    if (t.edges.size() + 1 == n) break;
  }
  return t;
}

// Planar L1: in each of the eight octants around a point only the nearest
// point can be an MST neighbour. Four sweeps in x + y order with a y-keyed
// active set find those neighbours.
inline std::vector<Edge> l1_octant_candidates(const PointSet& x, const MetricSpec& m) {
  const std::size_t n = x.size();
  std::vector<double> px(n), py(n);
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = x.coord(i, 0);
    py[i] = x.coord(i, 1);
  }
  std::vector<std::size_t> id(n);
  std::vector<Edge> cand;
  cand.reserve(4 * n);
  for (int pass = 0; pass < 4; ++pass) {
    std::iota(id.begin(), id.end(), 0);
    std::sort(id.begin(), id.end(), [&](std::size_t a, std::size_t b) {
      double ka = px[a] + py[a], kb = px[b] + py[b];
      return ka < kb || (ka == kb && a < b);
    });
    std::multimap<double, std::size_t> active;  // keyed by -y
    for (auto i : id) {
      for (auto it = active.lower_bound(-py[i]); it != active.end();) {
        std::size_t j = it->second;
        double dx = px[i] - px[j], dy = py[i] - py[j];
        if (dy > dx) break;
        std::size_t lo = std::min(i, j), hi = std::max(i, j);
        cand.push_back({lo, hi, distance(x[lo], x[hi], m)});
        it = active.erase(it);
      }
      active.emplace(-py[i], i);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (pass % 2 == 0)
        std::swap(px[i], py[i]);
      else
        px[i] = -px[i];
    }
  }
  return cand;
}

}  // namespace detail

// Planar L1 uses the octant candidate graph (O(n log n)); everything else
// runs dense Prim.
inline SpanningTree minimum_spanning_tree(const PointSet& x, const MetricSpec& m) {
  if (x.size() == 0) throw ParameterError("minimum spanning tree of an empty point set");
  check_metric_dim(m, x.dim());
  if (m.kind == MetricKind::l1 && x.dim() == 2 && x.size() > 2) {
    auto t = detail::kruskal(x.size(), detail::l1_octant_candidates(x, m));
    if (t.edges.size() + 1 == x.size()) return t;
  }
  return dense_minimum_spanning_tree(x, m);
}

struct MergeNode {
  std::optional<Edge> split_edge;
  std::array<std::size_t, 2> children{0, 0};
  bool leaf = true;
  std::size_t size = 1;
  std::size_t parent = std::numeric_limits<std::size_t>::max();
};

// Leaves 0..n-1 are the points; internal nodes n..2n-2 appear in Kruskal
// merge order, so children always precede parents.
struct MergeTree {
  std::size_t n = 0;
  std::vector<MergeNode> nodes;
  std::size_t root = 0;

  std::vector<std::size_t> members(std::size_t v) const {
    std::vector<std::size_t> out;
    std::vector<std::size_t> stack{v};
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      if (nodes[u].leaf) {
        out.push_back(u);
      } else {
        stack.push_back(nodes[u].children[1]);
        stack.push_back(nodes[u].children[0]);
      }
    }
    return out;
  }
};

inline MergeTree build_merge_tree(const SpanningTree& t) {
  MergeTree r;
  r.n = t.n;
  if (t.n == 0) return r;
  if (t.edges.size() + 1 != t.n) throw ParameterError("spanning tree has the wrong edge count");
  r.nodes.resize(t.n);
  auto edges = t.edges;
  std::sort(edges.begin(), edges.end(), edge_less);
  std::vector<std::size_t> uf(t.n), comp_node(t.n);
  std::iota(uf.begin(), uf.end(), 0);
  std::iota(comp_node.begin(), comp_node.end(), 0);
  auto find = [&](std::size_t a) {
    while (uf[a] != a) a = uf[a] = uf[uf[a]];
    return a;
  };
  for (const auto& e : edges) {
    std::size_t lo = std::min(e.i, e.j), hi = std::max(e.i, e.j);
    std::size_t a = find(lo), b = find(hi);
    if (a == b) throw ParameterError("spanning tree contains a cycle");
    MergeNode node;
    node.leaf = false;
    node.split_edge = Edge{lo, hi, e.w};
    node.children = {comp_node[a], comp_node[b]};
    node.size = r.nodes[comp_node[a]].size + r.nodes[comp_node[b]].size;
    std::size_t id = r.nodes.size();
    r.nodes[comp_node[a]].parent = id;
    r.nodes[comp_node[b]].parent = id;
    r.nodes.push_back(node);
    uf[b] = a;
    comp_node[a] = id;
  }
  r.root = r.nodes.size() - 1;
  return r;
}

}  // namespace stable_cluster
