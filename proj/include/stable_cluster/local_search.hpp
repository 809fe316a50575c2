#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <iterator>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "stable_cluster/center_set.hpp"
#include "stable_cluster/clustering.hpp"
#include "stable_cluster/errors.hpp"
#include "stable_cluster/geometry.hpp"
#include "stable_cluster/l1_subdivision.hpp"
#include "stable_cluster/range_index.hpp"

namespace stable_cluster {

enum class SwapEngine { naive, accelerated };

inline std::string to_string(SwapEngine e) { return e == SwapEngine::naive ? "naive" : "accelerated"; }

inline SwapEngine parse_engine(const std::string& s) {
  if (s == "naive") return SwapEngine::naive;
  if (s == "accelerated") return SwapEngine::accelerated;
  throw ParameterError("unknown engine: " + s);
}

inline double swap_cost_naive(const PointSet& x, const CenterSet& s, const MetricSpec& m) {
  if (s.size() == 0) throw ParameterError("empty center set");
  double total = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (auto c : s.ids) best = std::min(best, distance(x[p], x[c], m));
    total += best;
  }
  return total;
}

// L1 cost of X against arbitrary planar centers, one range query per cell.
inline double swap_cost_accelerated(const RangeIndex& idx, std::vector<Planar> centers) {
  if (centers.empty()) throw ParameterError("empty center set");
  std::sort(centers.begin(), centers.end());
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  if (idx.size() == 0) return 0.0;
  auto box = idx.bounding_box();
  auto sub = build_swap_subdivision(centers, box[0], box[1]);
  auto o = idx.origin();
  double total = 0.0;
  for (const auto& cell : sub.cells) {
    auto r = idx.query(cell.shape);
    if (r.count == 0) continue;
    const auto& c = sub.centers[cell.owner];
    double part = cell.u[0] * r.sx + cell.u[1] * r.sy -
                  static_cast<double>(r.count) * (cell.u[0] * (c[0] - o[0]) + cell.u[1] * (c[1] - o[1]));
    total += part;
  }
  return total;
}

inline std::vector<Planar> planar_centers(const PointSet& x, const CenterSet& s) {
  std::vector<Planar> out;
  out.reserve(s.size());
  for (auto i : s.ids) out.push_back({x.coord(i, 0), x.coord(i, 1)});
  return out;
}

inline double swap_cost_accelerated(const RangeIndex& idx, const PointSet& x, const CenterSet& s) {
  return swap_cost_accelerated(idx, planar_centers(x, s));
}

struct SwapMove {
  std::size_t x = 0;  // enters
  std::size_t y = 0;  // leaves
  double cost = 0.0;
};

struct SwapContext {
  SwapEngine engine = SwapEngine::naive;
  const RangeIndex* index = nullptr;  // required for the accelerated engine
  unsigned threads = 1;
};

inline bool strictly_improves(double candidate, double current) {
  return candidate < current - 1e-12 * (1.0 + std::abs(current));
}

inline void require_engine(const PointSet& x, const MetricSpec& m, const SwapContext& ctx) {
  if (ctx.engine != SwapEngine::accelerated) return;
  if (x.dim() != 2) throw UnsupportedEngineError("accelerated engine requires d = 2");
  if (m.kind != MetricKind::l1) throw UnsupportedEngineError("accelerated engine requires the L1 metric");
  if (!ctx.index) throw ParameterError("accelerated engine needs a range index");
}

inline double current_cost(const PointSet& x, const CenterSet& s, const MetricSpec& m, const SwapContext& ctx) {
  return ctx.engine == SwapEngine::naive ? swap_cost_naive(x, s, m) : swap_cost_accelerated(*ctx.index, x, s);
}

// Cheapest S + x - y over (X \ S) x S. Ties go to the smaller x, then to the
// earlier position of y in S. Returns nullopt unless the best strictly improves.
inline std::optional<SwapMove> best_1swap(const PointSet& x, const CenterSet& s, const MetricSpec& m,
                                          const SwapContext& ctx, double* cost_now = nullptr) {
  require_engine(x, m, ctx);
  const std::size_t n = x.size(), k = s.size();
  s.validate(n);
  const double cur = current_cost(x, s, m, ctx);
  if (cost_now) *cost_now = cur;
  std::vector<char> in_s(n, 0);
  for (auto c : s.ids) in_s[c] = 1;

  // nearest and second nearest of every point, for the naive engine
  std::vector<double> d1, d2;
  std::vector<std::size_t> n1;
  if (ctx.engine == SwapEngine::naive) {
    d1.assign(n, std::numeric_limits<double>::infinity());
    d2 = d1;
    n1.assign(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t j = 0; j < k; ++j) {
        double d = distance(x[p], x[s.ids[j]], m);
        if (d < d1[p]) {
          d2[p] = d1[p];
          d1[p] = d;
          n1[p] = j;
        } else if (d < d2[p]) {
          d2[p] = d;
        }
      }
    }
  }

  struct Best {
    double cost = std::numeric_limits<double>::infinity();
    std::size_t x = 0, ypos = 0;
    bool set = false;
    bool better(double c, std::size_t xi, std::size_t yp) const {
      if (!set) return true;
      if (c != cost) return c < cost;
      return xi < x || (xi == x && yp < ypos);
    }
  };
  const unsigned t = std::max(1u, ctx.threads);
  std::vector<Best> partial(t);
  auto work = [&](unsigned tid) {
    Best& b = partial[tid];
    std::vector<double> dx(ctx.engine == SwapEngine::naive ? n : 0);
    for (std::size_t xi = tid; xi < n; xi += t) {
      if (in_s[xi]) continue;
      if (ctx.engine == SwapEngine::naive) {
        for (std::size_t p = 0; p < n; ++p) dx[p] = distance(x[p], x[xi], m);
        for (std::size_t yp = 0; yp < k; ++yp) {
          double total = 0.0;
          for (std::size_t p = 0; p < n; ++p) total += std::min(dx[p], n1[p] == yp ? d2[p] : d1[p]);
          if (b.better(total, xi, yp)) b = {total, xi, yp, true};
        }
      } else {
        auto pts = planar_centers(x, s);
        for (std::size_t yp = 0; yp < k; ++yp) {
          auto cand = pts;
          cand[yp] = {x.coord(xi, 0), x.coord(xi, 1)};
          double total = swap_cost_accelerated(*ctx.index, cand);
          if (b.better(total, xi, yp)) b = {total, xi, yp, true};
        }
      }
    }
  };
  if (t == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < t; ++i) pool.emplace_back(work, i);
    for (auto& th : pool) th.join();
  }
  Best best;
  for (const auto& b : partial)
    if (b.set && best.better(b.cost, b.x, b.ypos)) best = b;
  if (!best.set || !strictly_improves(best.cost, cur)) return std::nullopt;
  return SwapMove{best.x, s.ids[best.ypos], best.cost};
}

enum class InitKind { gonzalez, random, explicit_set };

struct LocalSearchOptions {
  SwapEngine engine = SwapEngine::naive;
  InitKind init = InitKind::gonzalez;
  CenterSet initial;           // for explicit_set
  std::uint64_t seed = 0;      // for random
  unsigned threads = 1;
  std::size_t max_iterations = 1000000;
};

struct LocalSearchResult {
  Clustering clustering;
  CenterSet initial, final_centers;
  std::size_t iterations = 0;
  std::vector<SwapMove> swaps;
  std::vector<double> cost_trace;  // cost before the first swap and after each swap
};

// Partition induced by centers: nearest center, ties to the smaller index.
// Clusters are numbered by their smallest member.
inline Clustering clustering_from_centers(const PointSet& x, const CenterSet& s, const MetricSpec& m) {
  std::vector<std::size_t> ids = s.ids;
  std::sort(ids.begin(), ids.end());
  std::vector<std::size_t> labels(x.size(), 0);
  std::vector<double> dist(x.size(), 0.0);
  for (std::size_t p = 0; p < x.size(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < ids.size(); ++j) {
      double d = distance(x[p], x[ids[j]], m);
      if (d < best) {
        best = d;
        labels[p] = j;
      }
    }
    dist[p] = best;
  }
  // first-appearance order; centers that attract no point go last
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> remap(ids.size(), none);
  std::size_t next = 0;
  for (auto l : labels)
    if (remap[l] == none) remap[l] = next++;
  for (auto& r : remap)
    if (r == none) r = next++;
  for (auto& l : labels) l = remap[l];
  Clustering c;
  c.objective = Objective::median;
  c.labels = std::move(labels);
  c.centers.assign(ids.size(), {});
  c.per_cluster_cost.assign(ids.size(), 0.0);
  for (std::size_t j = 0; j < ids.size(); ++j) c.centers[remap[j]] = x.point(ids[j]);
  for (std::size_t p = 0; p < x.size(); ++p) c.per_cluster_cost[c.labels[p]] += dist[p];
  c.total_cost = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) c.total_cost += dist[p];
  return c;
}

inline CenterSet random_centers(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::vector<std::size_t> pick;
  std::sample(all.begin(), all.end(), std::back_inserter(pick), static_cast<std::ptrdiff_t>(k), rng);
  return {pick};
}

inline LocalSearchResult local_search_kmedian(const PointSet& x, std::size_t k, const MetricSpec& m,
                                              const LocalSearchOptions& opt = {}) {
  const std::size_t n = x.size();
  if (n == 0) throw ParameterError("empty point set");
  if (k < 1) throw ParameterError("k must be >= 1");
  if (k > n) throw InfeasibleError("k exceeds the number of points");
  check_metric_dim(m, x.dim());
  SwapContext ctx{opt.engine, nullptr, opt.threads};
  if (opt.engine == SwapEngine::accelerated) {
    if (x.dim() != 2) throw UnsupportedEngineError("accelerated engine requires d = 2");
    if (m.kind != MetricKind::l1) throw UnsupportedEngineError("accelerated engine requires the L1 metric");
  }
  std::optional<RangeIndex> index;
  if (opt.engine == SwapEngine::accelerated) {
    index.emplace(x);
    ctx.index = &*index;
  }
  LocalSearchResult r;
  switch (opt.init) {
    case InitKind::gonzalez: r.initial = gonzalez_kcenter(x, k, m).centers; break;
    case InitKind::random: r.initial = random_centers(n, k, opt.seed); break;
    case InitKind::explicit_set:
      if (opt.initial.size() != k) throw ParameterError("initial center set must have k entries");
      r.initial = opt.initial;
      break;
  }
  r.initial.validate(n);
  CenterSet s = r.initial;
  while (r.iterations < opt.max_iterations) {
    double now = 0.0;
    auto mv = best_1swap(x, s, m, ctx, &now);
    if (r.cost_trace.empty()) r.cost_trace.push_back(now);
    if (!mv) break;
    s = s.swapped(mv->y, mv->x);
    r.swaps.push_back(*mv);
    r.cost_trace.push_back(mv->cost);
    ++r.iterations;
  }
  r.final_centers = s;
  r.clustering = clustering_from_centers(x, s, m);
  return r;
}

struct SwapDiagnostics {
  // index 0..3 = X_00, X_01, X_10, X_11
  std::array<std::size_t, 4> size{0, 0, 0, 0};
  std::array<double, 4> cost{0, 0, 0, 0};      // under S
  std::array<double, 4> cost_opt{0, 0, 0, 0};  // under O
  std::vector<std::uint8_t> group;             // per point
  double total = 0.0, total_opt = 0.0;
  double c = 0.0;
  double gap = 0.0;  // $(X) - $*(X) - C $*(X_00)
  bool c_good() const { return gap <= 0.0; }
};

inline SwapDiagnostics classify_swap_diagnostics(const PointSet& x, const CenterSet& s, const CenterSet& o,
                                                 const MetricSpec& m, double c) {
  if (s.size() != o.size()) throw ParameterError("S and O must have the same size");
  s.validate(x.size());
  o.validate(x.size());
  auto nearest = [&](std::size_t p, const CenterSet& cs) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (auto id : cs.ids) {
      double d = distance(x[p], x[id], m);
      if (d < best) {
        best = d;
        arg = id;
      }
    }
    return std::pair{arg, best};
  };
  SwapDiagnostics r;
  r.c = c;
  r.group.resize(x.size());
  for (std::size_t p = 0; p < x.size(); ++p) {
    auto [a, da] = nearest(p, s);
    auto [b, db] = nearest(p, o);
    const int g = (o.contains(a) ? 2 : 0) + (s.contains(b) ? 1 : 0);
    r.group[p] = static_cast<std::uint8_t>(g);
    ++r.size[g];
    r.cost[g] += da;
    r.cost_opt[g] += db;
    r.total += da;
    r.total_opt += db;
  }
  r.gap = r.total - r.total_opt - c * r.cost_opt[0];
  return r;
}

}  // namespace stable_cluster
