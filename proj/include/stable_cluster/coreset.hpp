#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "stable_cluster/center_set.hpp"
#include "stable_cluster/clustering.hpp"
#include "stable_cluster/errors.hpp"
#include "stable_cluster/geometry.hpp"
#include "stable_cluster/one_clustering.hpp"

namespace stable_cluster {

struct CoresetOrigin {
  std::size_t depth = 0;   // recursion level (k, k-1, ...)
  std::size_t center = 0;  // approximate cluster at that level
  std::size_t ring = 0;    // 0 is the innermost ball
};

struct Coreset {
  std::vector<std::size_t> members;  // sorted indices into X
  std::vector<CoresetOrigin> origin;  // parallel to members
  double epsilon = 1.0;
};

struct CoresetOptions {
  double inner_fraction = 0.5;  // innermost ring radius = r * eps * inner_fraction
  double cell_fraction = 1.0;   // grid pitch = cell_fraction * eps * ring radius / sqrt(d)
  std::size_t max_size = 200000;
};

namespace detail {

inline void coreset_level(const PointSet& x, const std::vector<std::size_t>& ids, std::size_t k,
                          double eps, const MetricSpec& m, const CoresetOptions& opt, std::size_t depth,
                          std::map<std::size_t, CoresetOrigin>& out) {
  if (ids.empty() || k == 0) return;
  const std::size_t d = x.dim();
  PointSet sub = x.subset(ids);
  auto g = gonzalez_kcenter(sub, std::min(k, ids.size()), m);
  const std::size_t kk = g.centers.size();
  auto add = [&](std::size_t local, CoresetOrigin o) {
    out.emplace(ids[local], o);
    if (out.size() > opt.max_size)
      throw BudgetError("coreset exceeds " + std::to_string(opt.max_size) + " points at depth " +
                        std::to_string(depth) + " (k=" + std::to_string(k) + ", eps=" + std::to_string(eps) + ")");
  };
  const double r = g.radius;
  if (r == 0.0) {
    for (std::size_t j = 0; j < kk; ++j) {
      bool fresh = true;
      for (std::size_t i = 0; i < j && fresh; ++i)
        fresh = !same_point(sub[g.centers.ids[i]], sub[g.centers.ids[j]]);
      if (fresh) add(g.centers.ids[j], {depth, j, 0});
    }
    return;
  }
  const double inner = r * eps * opt.inner_fraction;
  std::vector<std::map<std::vector<std::int64_t>, std::size_t>> cells(kk);
  std::vector<std::size_t> cluster_size(kk, 0);
  for (std::size_t p = 0; p < sub.size(); ++p) {
    const std::size_t j = g.assignment[p];
    ++cluster_size[j];
    const double dist = g.dist[p];
    std::size_t ring = 0;
    double outer = inner;
    while (dist > outer) {
      outer *= 2;
      ++ring;
    }
    const double pitch = opt.cell_fraction * eps * outer / std::sqrt(static_cast<double>(d));
    std::vector<std::int64_t> key(d + 1);
    key[0] = static_cast<std::int64_t>(ring);
    const auto c = sub[g.centers.ids[j]];
    for (std::size_t a = 0; a < d; ++a)
      key[a + 1] = static_cast<std::int64_t>(std::floor((sub.coord(p, a) - c[a]) / pitch));
    cells[j].emplace(std::move(key), p);  // keeps the lowest index per cell
  }
  for (std::size_t j = 0; j < kk; ++j)
    for (const auto& [key, p] : cells[j]) add(p, {depth, j, static_cast<std::size_t>(key[0])});
  if (k <= 1) return;
  std::size_t largest = 0;
  for (std::size_t j = 1; j < kk; ++j)
    if (cluster_size[j] > cluster_size[largest]) largest = j;
  std::vector<std::size_t> rest;
  for (std::size_t p = 0; p < sub.size(); ++p)
    if (g.assignment[p] != largest) rest.push_back(ids[p]);
  coreset_level(x, rest, k - 1, eps, m, opt, depth + 1, out);
}

}  // namespace detail

// Rings around Gonzalez centers with one representative per grid cell, then
// the same on X minus the largest approximate cluster with k - 1.
inline Coreset build_multiplicative_coreset(const PointSet& x, std::size_t k, double eps, const MetricSpec& m,
                                            const CoresetOptions& opt = {}) {
  if (x.size() == 0) throw ParameterError("empty point set");
  if (k < 1 || k > x.size()) throw ParameterError("k must satisfy 1 <= k <= n");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("eps must be positive");
  check_metric_dim(m, x.dim());
  std::vector<std::size_t> all(x.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::map<std::size_t, CoresetOrigin> found;
  detail::coreset_level(x, all, k, eps, m, opt, 0, found);
  Coreset c;
  c.epsilon = eps;
  // one member per location
  std::set<Point> seen;
  for (const auto& [i, o] : found) {
    if (!seen.insert(x.point(i)).second) continue;
    c.members.push_back(i);
    c.origin.push_back(o);
  }
  return c;
}

// Checks X against the (1+eps)-expanded balls of a clustering of Q given by
// labels over c.members. Each ball uses the 1-center of its group.
inline bool covers_expanded(const PointSet& x, const Coreset& c, const std::vector<std::size_t>& labels,
                            std::size_t k, const MetricSpec& m, double* worst_ratio = nullptr) {
  std::vector<std::vector<std::size_t>> groups(k);
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(c.members[i]);
  std::vector<OneClusterResult> balls;
  for (const auto& g : groups)
    if (!g.empty()) balls.push_back(one_cluster_direct(x, g, Objective::center, m));
  double worst = 0.0;
  bool ok = true;
  for (std::size_t p = 0; p < x.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : balls) {
      double dd = distance(x[p], b.center, m);
      double ratio = dd == 0.0 ? 0.0 : b.cost == 0.0 ? std::numeric_limits<double>::infinity() : dd / b.cost;
      best = std::min(best, ratio);
    }
    worst = std::max(worst, best);
    if (best > 1.0 + c.epsilon) ok = false;
  }
  if (worst_ratio) *worst_ratio = worst;
  return ok;
}

struct CoresetSolveResult {
  Clustering clustering;
  Coreset coreset;
  std::vector<std::size_t> representatives;  // chosen subset, indices into X
  std::size_t subsets_evaluated = 0;
  double subset_cost = 0.0;  // cost with the representatives as centers
};

struct CoresetSolveOptions {
  double epsilon = 1.0;
  CoresetOptions coreset;
  double max_subsets = 1e7;
  unsigned threads = 1;
};

inline CoresetSolveResult solve_via_coreset(const PointSet& x, std::size_t k, Objective o, const MetricSpec& m,
                                            const CoresetSolveOptions& opt = {}) {
  const std::size_t n = x.size();
  if (n == 0) throw ParameterError("empty point set");
  if (k < 1) throw ParameterError("k must be >= 1");
  if (k > n) throw InfeasibleError("k exceeds the number of points");
  CoresetSolveResult res;
  res.coreset = build_multiplicative_coreset(x, k, opt.epsilon, m, opt.coreset);
  const auto& q = res.coreset.members;
  const std::size_t nq = q.size();
  if (nq < k) throw InfeasibleError("fewer than k distinct locations in the coreset");
  double subsets = 1.0;
  for (std::size_t i = 0; i < k; ++i) subsets = subsets * static_cast<double>(nq - i) / static_cast<double>(i + 1);
  if (subsets > opt.max_subsets)
    throw BudgetError("C(" + std::to_string(nq) + "," + std::to_string(k) + ") subsets exceed the budget");
  const MetricSpec cm = cost_metric(o, m);
  std::vector<std::vector<double>> dm(nq, std::vector<double>(n));
  for (std::size_t a = 0; a < nq; ++a)
    for (std::size_t p = 0; p < n; ++p) dm[a][p] = pair_cost(x[p], x[q[a]], cm, o);

  struct Best {
    double cost = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick;
    std::size_t evaluated = 0;
  };
  const unsigned t = std::max(1u, opt.threads);
  std::vector<Best> partial(t);
  // depth-first over combinations with running minima per level
  auto work = [&](unsigned tid) {
    Best& b = partial[tid];
    std::vector<std::vector<double>> run(k + 1, std::vector<double>(n, std::numeric_limits<double>::infinity()));
    std::vector<std::size_t> pick(k);
    auto rec = [&](auto&& self, std::size_t level, std::size_t start) -> void {
      for (std::size_t a = start; a + (k - level) <= nq; ++a) {
        if (level == 0 && a % t != tid) continue;
        pick[level] = a;
        auto& cur = run[level + 1];
        const auto& prev = run[level];
        for (std::size_t p = 0; p < n; ++p) cur[p] = std::min(prev[p], dm[a][p]);
        if (level + 1 == k) {
          ++b.evaluated;
          double cost = 0.0;
          for (std::size_t p = 0; p < n; ++p) cost = o == Objective::center ? std::max(cost, cur[p]) : cost + cur[p];
          if (cost < b.cost) {
            b.cost = cost;
            b.pick = pick;
          }
        } else {
          self(self, level + 1, a + 1);
        }
      }
    };
    rec(rec, 0, 0);
  };
  if (t == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < t; ++i) pool.emplace_back(work, i);
    for (auto& th : pool) th.join();
  }
  Best best;
  for (const auto& b : partial) {
    best.evaluated += b.evaluated;
    if (b.pick.empty()) continue;
    if (b.cost < best.cost || (b.cost == best.cost && b.pick < best.pick)) {
      best.cost = b.cost;
      best.pick = b.pick;
    }
  }
  res.subsets_evaluated = best.evaluated;
  res.subset_cost = best.cost;
  for (auto a : best.pick) res.representatives.push_back(q[a]);
  std::vector<std::size_t> labels(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      double dd = dm[best.pick[j]][p];
      if (dd < bd) {
        bd = dd;
        labels[p] = j;
      }
    }
  }
  res.clustering = clustering_from_labels(x, std::move(labels), o, m);
  return res;
}

}  // namespace stable_cluster
