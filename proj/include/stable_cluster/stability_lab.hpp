#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stable_cluster/clustering.hpp"
#include "stable_cluster/errors.hpp"
#include "stable_cluster/geometry.hpp"
#include "stable_cluster/one_clustering.hpp"

namespace stable_cluster {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------- verifiers

struct ProximityReport {
  bool passed = true;
  double certified_alpha = kInf;  // min over p, j != own of delta(p,c_j) / delta(p,c_own)
  std::size_t violations = 0;
  std::size_t coincident = 0;     // points sitting on a foreign center
};

inline ProximityReport verify_center_proximity(const PointSet& x, const Clustering& c, double alpha,
                                               const MetricSpec& m) {
  ProximityReport r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t own = c.labels[i];
    double d_own = distance(x[i], c.centers[own], m);
    for (std::size_t j = 0; j < c.centers.size(); ++j) {
      if (j == own) continue;
      double d_far = distance(x[i], c.centers[j], m);
      if (d_far == 0.0) {
        ++r.coincident;
        ++r.violations;
        r.certified_alpha = 0.0;
        continue;
      }
      if (d_own > 0.0) r.certified_alpha = std::min(r.certified_alpha, d_far / d_own);
      if (!(alpha * d_own < d_far)) ++r.violations;
    }
  }
  r.passed = r.violations == 0;
  return r;
}

// Worst ratio rhs / lhs over all tuples of one inequality lhs < rhs.
struct PropertyCheck {
  std::string name;
  bool applicable = true;
  bool passed = true;
  double worst_ratio = kInf;
  std::size_t tuples = 0;

  void add(double lhs, double rhs) {
    ++tuples;
    if (lhs > 0.0) worst_ratio = std::min(worst_ratio, rhs / lhs);
    if (!(lhs < rhs)) passed = false;
  }
};

struct SeparationReport {
  bool passed = true;
  bool sampled = false;
  std::vector<PropertyCheck> properties;  // (1)..(5), then the threshold forms
};

struct SeparationOptions {
  std::size_t exhaustive_limit = 5000;
  std::size_t sample_anchors = 2000;
  std::uint64_t seed = 0;
};

// Center-proximity consequences evaluated through per-point and per-cluster
// reductions, so every tuple is covered in O(n^2). Above the exhaustive limit
// only a sample of anchor points p is used.
inline SeparationReport verify_separation(const PointSet& x, const Clustering& c, double alpha,
                                          const MetricSpec& m, SeparationOptions opt = {}) {
  const std::size_t n = x.size(), k = c.centers.size();
  SeparationReport rep;
  std::vector<PropertyCheck> pc(8);
  pc[0].name = "(1) (a-1)d(p,c1) < d(p,q)";
  pc[1].name = "(2) (a-1)d(p,c1) < d(c1,c2)";
  pc[2].name = "(3) (a-1)d(c1,c2) < (a+1)d(p,q)";
  pc[3].name = "(4) (a-1)d(p,p') < 2a/(a-1) d(p,q)";
  pc[4].name = "(5) (a-1)d(p',p'') < 2(a+1)/(a-1) d(p,q)";
  pc[5].name = "(4t) d(p,p') < d(p,q), a >= 2+sqrt3";
  pc[6].name = "(5t) d(p',p'') < d(p,q), a >= 2+sqrt5";
  pc[7].name = "intra <= inter: d(p,p') <= d(p'',q)";
  pc[5].applicable = alpha >= 2.0 + std::sqrt(3.0);
  pc[6].applicable = alpha >= 2.0 + std::sqrt(5.0);

  std::vector<std::size_t> anchors(n);
  for (std::size_t i = 0; i < n; ++i) anchors[i] = i;
  if (n > opt.exhaustive_limit) {
    rep.sampled = true;
    std::mt19937_64 rng(opt.seed);
    std::shuffle(anchors.begin(), anchors.end(), rng);
    anchors.resize(opt.sample_anchors);
  }

  std::vector<double> diam(k, 0.0), min_cross(k, kInf);
  std::vector<std::vector<double>> pair_min(k, std::vector<double>(k, kInf));
  std::vector<double> max_own(k, 0.0);
  for (auto p : anchors) {
    const std::size_t cp = c.labels[p];
    double intra = 0.0, inter = kInf;
    for (std::size_t q = 0; q < n; ++q) {
      double dd = distance(x[p], x[q], m);
      const std::size_t cq = c.labels[q];
      if (cq == cp) {
        intra = std::max(intra, dd);
      } else {
        inter = std::min(inter, dd);
        pair_min[cp][cq] = std::min(pair_min[cp][cq], dd);
        pair_min[cq][cp] = std::min(pair_min[cq][cp], dd);
      }
    }
    diam[cp] = std::max(diam[cp], intra);
    min_cross[cp] = std::min(min_cross[cp], inter);
    double d_own = distance(x[p], c.centers[cp], m);
    max_own[cp] = std::max(max_own[cp], d_own);
    if (k < 2) continue;
    pc[0].add((alpha - 1.0) * d_own, inter);
    pc[3].add((alpha - 1.0) * intra, 2.0 * alpha / (alpha - 1.0) * inter);
    if (pc[5].applicable) pc[5].add(intra, inter);
  }
  if (k >= 2) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        if (a == b) continue;
        double cc = distance(c.centers[a], c.centers[b], m);
        pc[1].add((alpha - 1.0) * max_own[a], cc);
        if (pair_min[a][b] < kInf) pc[2].add((alpha - 1.0) * cc, (alpha + 1.0) * pair_min[a][b]);
      }
      if (min_cross[a] < kInf) {
        pc[4].add((alpha - 1.0) * diam[a], 2.0 * (alpha + 1.0) / (alpha - 1.0) * min_cross[a]);
        if (pc[6].applicable) pc[6].add(diam[a], min_cross[a]);
        ++pc[7].tuples;
        if (diam[a] > 0.0) pc[7].worst_ratio = std::min(pc[7].worst_ratio, min_cross[a] / diam[a]);
        if (diam[a] > min_cross[a]) pc[7].passed = false;
      }
    }
  }
  for (std::size_t i = 0; i < 5; ++i) rep.passed = rep.passed && pc[i].passed;
  rep.properties = std::move(pc);
  return rep;
}

// ---------------------------------------------------------------- spread

struct SpreadReport {
  double spread = 0.0;
  double max_distance = 0.0;
  double min_nonzero_distance = kInf;
  std::size_t duplicate_pairs = 0;
};

inline SpreadReport spread(const PointSet& x, const MetricSpec& m) {
  if (x.size() < 2) throw ParameterError("spread needs at least two points");
  SpreadReport r;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      double dd = distance(x[i], x[j], m);
      if (dd == 0.0) {
        ++r.duplicate_pairs;
        continue;
      }
      r.max_distance = std::max(r.max_distance, dd);
      r.min_nonzero_distance = std::min(r.min_nonzero_distance, dd);
    }
  if (r.min_nonzero_distance == kInf) throw InfeasibleError("spread undefined: all points identical");
  r.spread = r.max_distance / r.min_nonzero_distance;
  return r;
}

// Euclidean spread without the quadratic scan: closest pair by an x-sorted
// sweep, diameter bounded by the bounding-box diagonal. Returns an upper bound.
inline SpreadReport spread_upper_bound(const PointSet& x) {
  if (x.size() < 2) throw ParameterError("spread needs at least two points");
  const std::size_t d = x.dim();
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x.coord(a, 0) < x.coord(b, 0); });
  SpreadReport r;
  for (std::size_t s = 0; s < order.size(); ++s)
    for (std::size_t t = s + 1; t < order.size(); ++t) {
      if (x.coord(order[t], 0) - x.coord(order[s], 0) >= r.min_nonzero_distance) break;
      double dd = distance(x[order[s]], x[order[t]], MetricSpec::euclidean());
      if (dd == 0.0) ++r.duplicate_pairs;
      else r.min_nonzero_distance = std::min(r.min_nonzero_distance, dd);
    }
  if (r.min_nonzero_distance == kInf) throw InfeasibleError("spread undefined: all points identical");
  double diag = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    double lo = kInf, hi = -kInf;
    for (std::size_t i = 0; i < x.size(); ++i) {
      lo = std::min(lo, x.coord(i, a));
      hi = std::max(hi, x.coord(i, a));
    }
    diag += (hi - lo) * (hi - lo);
  }
  r.max_distance = std::sqrt(diag);
  r.spread = r.max_distance / r.min_nonzero_distance;
  return r;
}

// ---------------------------------------------------------------- generator

struct Certificate {
  bool passed = false;
  ProximityReport proximity;
  SeparationReport separation;
};

struct StableInstance {
  PointSet points;
  Clustering ground_truth;
  std::vector<Point> sites;
  double alpha_target = 0.0;
  double radius = 1.0;
  Certificate certificate;
  double spread = 0.0;
  std::uint64_t seed = 0;
};

struct GeneratorOptions {
  double radius = 1.0;
  double spacing_factor = 2.0;  // site spacing >= spacing_factor * (alpha + 1) * radius
  int max_attempts = 50;
};

inline Certificate certify(const PointSet& x, const Clustering& c, double alpha) {
  Certificate cert;
  cert.proximity = verify_center_proximity(x, c, alpha, MetricSpec::euclidean());
  cert.separation = verify_separation(x, c, alpha, MetricSpec::euclidean());
  cert.passed = cert.proximity.passed && cert.separation.passed;
  return cert;
}

// Ground truth uses the sites as centers and the center objective under the
// Euclidean metric; labels are canonical (ordered by smallest member index).
inline StableInstance generate_stable_instance(std::size_t k, std::size_t n, std::size_t d,
                                               double alpha, std::uint64_t seed,
                                               GeneratorOptions opt = {}) {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (n < k) throw ParameterError("n must be >= k");
  if (d < 1) throw ParameterError("dimension must be >= 1");
  if (!(alpha > 1.0)) throw ParameterError("alpha must exceed 1");
  std::mt19937_64 rng(seed);
  const double r = opt.radius;
  const double spacing = opt.spacing_factor * (alpha + 1.0) * r;
  const double side = 2.0 * spacing * std::ceil(std::pow(static_cast<double>(k), 1.0 / double(d)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
    std::vector<Point> sites;
    int tries = 0;
    while (sites.size() < k && tries < 100000) {
      ++tries;
      Point s(d);
      for (auto& v : s) v = side * unit(rng);
      bool ok = true;
      for (const auto& t : sites)
        if (distance(s, t, MetricSpec::euclidean()) < spacing) ok = false;
      if (ok) sites.push_back(std::move(s));
    }
    if (sites.size() < k) continue;
    std::vector<std::size_t> raw_labels;
    std::vector<Point> pts;
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t count = n / k + (c < n % k ? 1 : 0);
      for (std::size_t t = 0; t < count; ++t) {
        Point dir(d);
        double s2 = 0.0;
        do {
          s2 = 0.0;
          for (auto& v : dir) {
            v = gauss(rng);
            s2 += v * v;
          }
        } while (s2 < 1e-24);
        double rad = r * std::pow(unit(rng), 1.0 / double(d)) / std::sqrt(s2);
        Point p(d);
        for (std::size_t a = 0; a < d; ++a) p[a] = sites[c][a] + rad * dir[a];
        pts.push_back(std::move(p));
        raw_labels.push_back(c);
      }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    StableInstance inst;
    inst.points = PointSet(d);
    std::vector<std::size_t> labels;
    for (auto i : order) {
      inst.points.push_back(pts[i]);
      labels.push_back(raw_labels[i]);
    }
    auto remap = canonical_labels(labels);
    inst.sites.resize(k);
    for (std::size_t c = 0; c < k; ++c) inst.sites[remap[c]] = sites[c];
    inst.ground_truth.labels = labels;
    inst.ground_truth.centers = inst.sites;
    inst.ground_truth.objective = Objective::center;
    inst.ground_truth.total_cost = recompute_cost(inst.points, labels, inst.sites, Objective::center,
                                                  MetricSpec::euclidean(),
                                                  &inst.ground_truth.per_cluster_cost);
    inst.alpha_target = alpha;
    inst.radius = r;
    inst.seed = seed;
    inst.certificate = certify(inst.points, inst.ground_truth, alpha);
    if (!inst.certificate.passed) continue;
    if (n >= 2)
      inst.spread = n <= 5000 ? spread(inst.points, MetricSpec::euclidean()).spread
                              : spread_upper_bound(inst.points).spread;
    return inst;
  }
  throw InfeasibleError("could not generate a certified instance");
}

// ---------------------------------------------------------------- oracle

enum class OracleMode { automatic, partition, discrete_centers };

struct OracleResult {
  Clustering clustering;
  OracleMode mode = OracleMode::partition;
  bool unique = true;
  double second_best = kInf;
  std::size_t evaluated = 0;
};

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

namespace detail {

inline bool ties(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

// Exhaustive discrete-center search over a cost matrix cost[p][c]. Labels are
// positions within the chosen subset (nearest, ties to the lower position).
struct DiscreteBest {
  std::vector<std::size_t> centers;
  std::vector<std::size_t> labels;
  double cost = kInf;
  bool unique = true;
  std::size_t evaluated = 0;
};

inline DiscreteBest discrete_center_search(std::size_t n, std::size_t k,
                                           const std::vector<std::vector<double>>& cost,
                                           Objective o) {
  DiscreteBest best;
  std::vector<std::size_t> sub(k);
  auto eval = [&](std::vector<std::size_t>* labels) {
    double total = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      double b = kInf;
      std::size_t arg = 0;
      for (std::size_t t = 0; t < k; ++t)
        if (cost[p][sub[t]] < b) {
          b = cost[p][sub[t]];
          arg = t;
        }
      total = o == Objective::center ? std::max(total, b) : total + b;
      if (labels) (*labels)[p] = arg;
    }
    return total;
  };
  auto for_each_subset = [&](auto&& fn) {
    for (std::size_t t = 0; t < k; ++t) sub[t] = t;
    while (true) {
      fn();
      std::size_t t = k;
      while (t > 0 && sub[t - 1] == n - k + t - 1) --t;
      if (t == 0) break;
      ++sub[t - 1];
      for (std::size_t u = t; u < k; ++u) sub[u] = sub[u - 1] + 1;
    }
  };
  for_each_subset([&] {
    ++best.evaluated;
    double v = eval(nullptr);
    if (v < best.cost) {
      best.cost = v;
      best.centers = sub;
    }
  });
  best.labels.assign(n, 0);
  sub = best.centers;
  eval(&best.labels);
  std::vector<std::size_t> probe(n);
  for_each_subset([&] {
    if (!best.unique) return;
    double v = eval(&probe);
    if (ties(v, best.cost) && !same_partition(probe, best.labels)) best.unique = false;
  });
  return best;
}

}  // namespace detail

inline OracleResult brute_force_optimal(const PointSet& x, std::size_t k, Objective o,
                                        const MetricSpec& m, OracleMode mode = OracleMode::automatic) {
  const std::size_t n = x.size();
  if (k < 1) throw ParameterError("k must be >= 1");
  if (k > n) throw InfeasibleError("k exceeds the number of points");
  if (mode == OracleMode::automatic)
    mode = (n <= 14 && k <= 4) ? OracleMode::partition : OracleMode::discrete_centers;
  const MetricSpec cm = cost_metric(o, m);
  OracleResult res;
  res.mode = mode;
  if (mode == OracleMode::discrete_centers) {
    if (binomial(n, k) > 1e6) throw BudgetError("discrete-center oracle limited to C(n,k) <= 1e6");
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t c = 0; c < n; ++c) cost[p][c] = pair_cost(x[p], x[c], cm, o);
    auto b = detail::discrete_center_search(n, k, cost, o);
    res.clustering = clustering_from_labels(x, b.labels, o, m);
    res.unique = b.unique;
    res.evaluated = b.evaluated;
    return res;
  }
  if (n > 14 || k > 4) throw BudgetError("partition oracle limited to n <= 14, k <= 4");
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<double> one(full + 1, kInf);
  std::vector<std::size_t> members;
  for (std::size_t mask = 1; mask <= full; ++mask) {
    members.clear();
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) members.push_back(i);
    one[mask] = one_cluster_direct(x, members, o, cm).cost;
  }
  auto plus = [o](double a, double b) { return o == Objective::center ? std::max(a, b) : a + b; };
  // best[j][mask], second[j][mask]: two smallest costs over distinct j-partitions
  std::vector<std::vector<double>> best(k + 1), second(k + 1);
  std::vector<std::vector<std::size_t>> arg(k + 1);
  best[1] = one;
  second[1].assign(full + 1, kInf);
  arg[1].assign(full + 1, 0);
  for (std::size_t j = 2; j <= k; ++j) {
    best[j].assign(full + 1, kInf);
    second[j].assign(full + 1, kInf);
    arg[j].assign(full + 1, 0);
    for (std::size_t mask = 1; mask <= full; ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountll(mask)) < j) continue;
      const std::size_t low = mask & (~mask + 1);
      const std::size_t rest_all = mask ^ low;
      // s = low | sub, with sub a proper subset of rest_all (rest must be nonempty)
      for (std::size_t sub = rest_all;; sub = (sub - 1) & rest_all) {
        const std::size_t s = low | sub;
        const std::size_t rest = mask ^ s;
        if (rest != 0 && best[j - 1][rest] < kInf) {
          ++res.evaluated;
          for (double tail : {best[j - 1][rest], second[j - 1][rest]}) {
            if (tail == kInf) continue;
            double v = plus(one[s], tail);
            if (v < best[j][mask]) {
              second[j][mask] = best[j][mask];
              best[j][mask] = v;
              arg[j][mask] = s;
            } else if (v < second[j][mask]) {
              second[j][mask] = v;
            }
          }
        }
        if (sub == 0) break;
      }
    }
  }
  std::vector<std::size_t> labels(n, 0);
  std::size_t mask = full;
  for (std::size_t j = k, lab = 0; j >= 1; --j, ++lab) {
    std::size_t s = j == 1 ? mask : arg[j][mask];
    for (std::size_t i = 0; i < n; ++i)
      if (s >> i & 1) labels[i] = lab;
    mask ^= s;
  }
  const double opt = best[k][full];
  res.second_best = second[k][full];
  res.unique = !detail::ties(res.second_best, opt) && res.second_best > opt;
  if (!res.unique) {
    // lexicographically smallest restricted-growth label vector at the optimum
    std::vector<std::size_t> rgs(n, 0), masks(k, 0);
    bool found = false;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
      if (found) return;
      if (n - i < k - used) return;
      if (i == n) {
        double v = 0.0;
        for (std::size_t b = 0; b < k; ++b) v = b == 0 ? one[masks[0]] : plus(v, one[masks[b]]);
        if (detail::ties(v, opt)) {
          labels = rgs;
          found = true;
        }
        return;
      }
      for (std::size_t b = 0; b <= std::min(used, k - 1); ++b) {
        rgs[i] = b;
        masks[b] |= std::size_t{1} << i;
        rec(i + 1, std::max(used, b + 1));
        masks[b] ^= std::size_t{1} << i;
        if (found) return;
      }
    };
    rec(0, 0);
  }
  res.clustering = clustering_from_labels(x, labels, o, m);
  return res;
}

// ---------------------------------------------------------------- perturbation

// delta~(p,q) = mult[p][q] * delta(p,q), mult in [1, alpha]; not symmetric.
struct PerturbedDistance {
  MetricSpec base;
  std::vector<std::vector<double>> multiplier;

  double operator()(const PointSet& x, std::size_t p, std::size_t q) const {
    return multiplier[p][q] * distance(x[p], x[q], base);
  }
};

struct PerturbationReport {
  std::size_t trials = 0;
  std::size_t failures = 0;
  bool adversarial_passed = true;
  std::vector<std::size_t> reference_labels;
};

namespace detail {

inline std::vector<std::size_t> perturbed_optimum(const PointSet& x, std::size_t k, Objective o,
                                                  const PerturbedDistance& pd) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t c = 0; c < n; ++c) {
      double v = pd(x, p, c);
      cost[p][c] = o == Objective::means ? v * v : v;
    }
  auto labels = discrete_center_search(n, k, cost, o).labels;
  canonical_labels(labels);
  return labels;
}

}  // namespace detail

// Falsification harness: random multiplier tables in [1, alpha] plus the
// structured pattern (inter-cluster pairs scaled by alpha, intra by 1) must
// leave the discrete-center optimal partition unchanged.
inline PerturbationReport perturbation_trial(const StableInstance& inst, double alpha,
                                             std::size_t trials, std::uint64_t seed,
                                             Objective o = Objective::median,
                                             const MetricSpec& m = MetricSpec::euclidean()) {
  const PointSet& x = inst.points;
  const std::size_t n = x.size();
  if (n > 14) throw BudgetError("perturbation trials limited to n <= 14");
  const std::size_t k = inst.ground_truth.centers.size();
  PerturbedDistance pd{cost_metric(o, m), std::vector<std::vector<double>>(n, std::vector<double>(n, 1.0))};
  PerturbationReport rep;
  rep.reference_labels = detail::perturbed_optimum(x, k, o, pd);
  const auto& gt = inst.ground_truth.labels;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) pd.multiplier[p][q] = gt[p] == gt[q] ? 1.0 : alpha;
  rep.adversarial_passed = detail::perturbed_optimum(x, k, o, pd) == rep.reference_labels;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(1.0, alpha);
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& row : pd.multiplier)
      for (auto& v : row) v = u(rng);
    ++rep.trials;
    if (detail::perturbed_optimum(x, k, o, pd) != rep.reference_labels) ++rep.failures;
  }
  return rep;
}

}  // namespace stable_cluster
