#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stable_cluster/coreset.hpp"
#include "stable_cluster/dp_solver.hpp"
#include "stable_cluster/json_io.hpp"
#include "stable_cluster/local_search.hpp"
#include "stable_cluster/point_io.hpp"
#include "stable_cluster/stability_lab.hpp"

using namespace stable_cluster;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

unsigned resolve_threads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("STABLE_CLUSTER_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw ParameterError("STABLE_CLUSTER_THREADS must be a positive integer");
  }
  return 1;
}

MetricSpec make_metric(const std::string& kind, double eps, Objective o, std::size_t d,
                       std::optional<double> certified) {
  if (kind == "auto") return resolve_auto_metric(o, d, certified, eps);
  if (kind == "euclidean") return MetricSpec::euclidean();
  if (kind == "l1") return MetricSpec::l1();
  if (kind == "polyhedral") return MetricSpec::polyhedral(d, eps);
  throw ParameterError("unknown metric: " + kind);
}

void emit(const json& j, const std::string& path) {
  if (path.empty())
    std::cout << j.dump(2) << '\n';
  else
    write_json_file(path, j);
}

std::string default_sidecar(const std::string& csv) {
  auto dot = csv.rfind('.');
  auto slash = csv.find_last_of("/\\");
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return csv.substr(0, dot) + ".json";
  return csv + ".json";
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      long long v = std::stoll(item, &pos);
      if (pos != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ParameterError("bad size list entry: " + item);
    }
  }
  if (out.empty()) throw ParameterError("empty size list");
  return out;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2;
}

// ------------------------------------------------------------------ generate

struct GenerateArgs {
  std::size_t k = 0, n = 0, d = 2;
  double alpha = 0.0, radius = 1.0;
  std::uint64_t seed = 0;
  std::string out, sidecar;
};

int run_generate(const GenerateArgs& a) {
  GeneratorOptions opt;
  opt.radius = a.radius;
  auto inst = generate_stable_instance(a.k, a.n, a.d, a.alpha, a.seed, opt);
  write_points_csv(a.out, inst.points);
  const std::string side = a.sidecar.empty() ? default_sidecar(a.out) : a.sidecar;
  write_json_file(side, instance_sidecar_json(inst));
  json summary{{"points", a.out}, {"sidecar", side}, {"certified", inst.certificate.passed},
               {"spread", inst.spread}};
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// --------------------------------------------------------------------- solve

struct SolveArgs {
  std::string input, output, instance, dump_tree;
  std::size_t k = 0;
  std::string objective = "median", metric = "auto", algorithm = "dp", engine = "naive", init = "gonzalez";
  double eps = 0.05, coreset_eps = 1.0;
  std::uint64_t seed = 0;
  bool no_timings = false, cross_check = false;
  bool engine_set = false, init_set = false;
};

json cross_check_json(const PointSet& x, std::size_t k, Objective o, const MetricSpec& m, const Clustering& c) {
  const std::size_t n = x.size();
  const bool feasible = (n <= 14 && k <= 4) || binomial(n, k) <= 1e6;
  if (!feasible) return json{{"performed", false}, {"reason", "instance exceeds oracle limits"}};
  auto ora = brute_force_optimal(x, k, o, m);
  return json{{"performed", true},
              {"oracle_mode", ora.mode == OracleMode::partition ? "partition" : "discrete_centers"},
              {"oracle_total_cost", ora.clustering.total_cost},
              {"partition_agrees", same_partition(c.labels, ora.clustering.labels)},
              {"cost_agrees", relative_close(c.total_cost, ora.clustering.total_cost, 1e-9)}};
}

int run_solve(const SolveArgs& a, unsigned threads) {
  const Objective o = parse_objective(a.objective);
  if (a.engine_set && a.algorithm != "local") throw ParameterError("--engine applies to --algorithm local only");
  if (a.init_set && a.algorithm != "local") throw ParameterError("--init applies to --algorithm local only");
  if (!a.dump_tree.empty() && a.algorithm != "dp") throw ParameterError("--dump-merge-tree applies to --algorithm dp only");
  if (a.algorithm == "local" && o != Objective::median) throw ParameterError("local search supports the median objective only");
  const SwapEngine engine = parse_engine(a.engine);

  PointSet x = read_points_csv(a.input);
  std::optional<json> side;
  std::optional<double> certified;
  if (!a.instance.empty()) {
    side = read_json_file(a.instance);
    if (side->value("/certificate/passed"_json_pointer, false)) certified = side->at("alpha_target").get<double>();
  }
  MetricSpec m = (a.algorithm == "local" && engine == SwapEngine::accelerated && a.metric == "auto")
                     ? MetricSpec::l1()
                     : make_metric(a.metric, a.eps, o, x.dim(), certified);
  check_metric_dim(m, x.dim());

  Clustering result;
  json j;
  auto t0 = Clock::now();
  if (a.algorithm == "dp") {
    auto r = solve_dp(x, a.k, o, m);
    const std::size_t bound = x.size() * ceil_log2(x.size());
    if (r.insertions > bound) throw std::logic_error("accumulator insertions exceed n*ceil(log2 n)");
    j = dp_result_json(r, m, a.k, !a.no_timings);
    if (!a.dump_tree.empty()) write_json_file(a.dump_tree, merge_tree_json(r.table.tree));
    result = r.clustering;
  } else if (a.algorithm == "local") {
    LocalSearchOptions opt;
    opt.engine = engine;
    opt.threads = threads;
    opt.seed = a.seed;
    if (a.init == "gonzalez")
      opt.init = InitKind::gonzalez;
    else if (a.init == "random")
      opt.init = InitKind::random;
    else
      throw ParameterError("unknown init: " + a.init);
    auto r = local_search_kmedian(x, a.k, m, opt);
    j = local_search_json(r, engine, m, a.k);
    if (!a.no_timings) j["timings"] = json{{"total_ms", ms_since(t0)}};
    result = r.clustering;
  } else if (a.algorithm == "coreset") {
    CoresetSolveOptions opt;
    opt.epsilon = a.coreset_eps;
    opt.threads = threads;
    auto r = solve_via_coreset(x, a.k, o, m, opt);
    j = coreset_json(r, m, a.k);
    if (!a.no_timings) j["timings"] = json{{"total_ms", ms_since(t0)}};
    result = r.clustering;
  } else if (a.algorithm == "oracle") {
    auto r = brute_force_optimal(x, a.k, o, m);
    j = oracle_json(r, m, a.k);
    if (!a.no_timings) j["timings"] = json{{"total_ms", ms_since(t0)}};
    result = r.clustering;
  } else {
    throw ParameterError("unknown algorithm: " + a.algorithm);
  }
  if (a.cross_check) j["cross_check"] = cross_check_json(x, a.k, o, m, result);
  if (side) {
    auto gt = labels_from_json(*side);
    if (gt.labels.size() != x.size()) throw ParameterError("sidecar label count does not match the point count");
    j["ground_truth_agrees"] = same_partition(result.labels, gt.labels);
  }
  emit(j, a.output);
  return 0;
}

// -------------------------------------------------------------------- verify

struct VerifyArgs {
  std::string input, instance, labels, output, metric = "euclidean", objective = "center";
  double eps = 0.05;
  std::optional<double> alpha;
};

int run_verify(const VerifyArgs& a) {
  PointSet x = read_points_csv(a.input);
  if (a.instance.empty() && a.labels.empty()) throw ParameterError("verify needs --instance or --labels");
  std::optional<json> side;
  if (!a.instance.empty()) side = read_json_file(a.instance);
  LabeledCenters lc = labels_from_json(a.labels.empty() ? *side : read_json_file(a.labels));
  if (lc.labels.size() != x.size()) throw ParameterError("label count does not match the point count");
  double alpha = 0.0;
  if (a.alpha)
    alpha = *a.alpha;
  else if (side && side->contains("alpha_target"))
    alpha = side->at("alpha_target").get<double>();
  else
    throw ParameterError("no alpha given and no alpha_target in the sidecar");
  const Objective o = parse_objective(a.objective);
  MetricSpec m = make_metric(a.metric, a.eps, o, x.dim(), std::nullopt);
  Clustering c;
  if (!lc.centers.empty()) {
    c.labels = lc.labels;
    c.centers = lc.centers;
    c.objective = o;
    std::size_t k = 0;
    for (auto l : c.labels) k = std::max(k, l + 1);
    if (k > c.centers.size()) throw ParameterError("labels reference missing centers");
  } else {
    c = clustering_from_labels(x, lc.labels, o, m);
  }
  Certificate cert;
  cert.proximity = verify_center_proximity(x, c, alpha, m);
  cert.separation = verify_separation(x, c, alpha, m);
  cert.passed = cert.proximity.passed && cert.separation.passed;
  json j = certificate_json(cert, alpha);
  j["metric"] = metric_json(m);
  emit(j, a.output);
  return cert.passed ? 0 : 1;
}

// --------------------------------------------------------------------- bench

struct BenchArgs {
  std::string algorithm = "dp", sizes = "10000,20000,40000,80000", objective = "center", metric = "auto",
              engine = "naive", output;
  std::size_t k = 5, d = 2, reps = 5;
  double alpha = 6.0, eps = 0.05;
  std::uint64_t seed = 1;
  bool no_timings = false;
};

int run_bench(const BenchArgs& a, unsigned threads) {
  const auto sizes = parse_size_list(a.sizes);
  const Objective o = a.algorithm == "local" ? Objective::median : parse_objective(a.objective);
  if (a.algorithm != "dp" && a.algorithm != "local") throw ParameterError("bench supports dp and local");
  if (a.reps < 1) throw ParameterError("--reps must be >= 1");
  const SwapEngine engine = parse_engine(a.engine);
  json rows = json::array();
  std::vector<double> medians;
  std::printf("%10s %14s %8s %12s %12s\n", "n", "median_ms", "ratio", a.algorithm == "dp" ? "insertions" : "iterations",
              a.algorithm == "dp" ? "ins_bound" : "iter_bound");
  for (std::size_t n : sizes) {
    auto inst = generate_stable_instance(a.k, n, a.d, a.alpha, a.seed + n);
    MetricSpec m = (a.algorithm == "local" && engine == SwapEngine::accelerated && a.metric == "auto")
                       ? MetricSpec::l1()
                       : make_metric(a.metric, a.eps, o, a.d, inst.alpha_target);
    std::vector<double> times;
    json row{{"n", n}, {"metric", metric_json(m)}, {"spread", inst.spread}};
    double count = 0.0, bound = 0.0;
    bool agrees = true;
    for (std::size_t r = 0; r < a.reps; ++r) {
      auto t0 = Clock::now();
      if (a.algorithm == "dp") {
        auto res = solve_dp(inst.points, a.k, o, m);
        times.push_back(ms_since(t0));
        count = static_cast<double>(res.insertions);
        bound = static_cast<double>(n * ceil_log2(n));
        agrees = agrees && same_partition(res.clustering.labels, inst.ground_truth.labels);
      } else {
        LocalSearchOptions opt;
        opt.engine = engine;
        opt.threads = threads;
        opt.init = InitKind::random;
        opt.seed = a.seed + r;
        auto res = local_search_kmedian(inst.points, a.k, m, opt);
        times.push_back(ms_since(t0));
        count = std::max(count, static_cast<double>(res.iterations));
        bound = 10.0 * static_cast<double>(a.k) * std::log2(static_cast<double>(n) * inst.spread);
        agrees = agrees && same_partition(res.clustering.labels, inst.ground_truth.labels);
      }
    }
    const double med = median_of(times);
    const double ratio = medians.empty() ? 0.0 : med / medians.back();
    medians.push_back(med);
    if (!a.no_timings) {
      row["median_ms"] = med;
      row["times_ms"] = times;
      if (ratio > 0) row["ratio"] = ratio;
    }
    row[a.algorithm == "dp" ? "insertions" : "max_iterations"] = count;
    row[a.algorithm == "dp" ? "insertion_bound" : "iteration_bound"] = bound;
    row["matches_ground_truth"] = agrees;
    rows.push_back(row);
    std::printf("%10zu %14.3f %8s %12.0f %12.1f\n", n, med, ratio > 0 ? std::to_string(ratio).substr(0, 5).c_str() : "-",
                count, bound);
    std::fflush(stdout);
  }
  json j{{"bench", a.algorithm}, {"objective", to_string(o)}, {"k", a.k}, {"d", a.d}, {"alpha", a.alpha},
         {"reps", a.reps}, {"rows", rows}};
  if (!a.output.empty()) write_json_file(a.output, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal clustering of perturbation-stable point sets"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads_flag = 0;
  app.add_option("--threads", threads_flag, "worker threads (default: $STABLE_CLUSTER_THREADS or 1)");

  GenerateArgs g;
  auto* gen = app.add_subcommand("generate", "write a certified stable instance (CSV + sidecar JSON)");
  gen->add_option("--k", g.k)->required();
  gen->add_option("--n", g.n)->required();
  gen->add_option("--d", g.d);
  gen->add_option("--alpha", g.alpha)->required();
  gen->add_option("--seed", g.seed);
  gen->add_option("--radius", g.radius);
  gen->add_option("--out,-o", g.out, "points CSV path")->required();
  gen->add_option("--sidecar", g.sidecar, "sidecar JSON path (default: CSV path with .json)");

  SolveArgs s;
  auto* sol = app.add_subcommand("solve", "cluster a CSV point set");
  sol->add_option("--input,-i", s.input)->required();
  sol->add_option("--k", s.k)->required();
  sol->add_option("--objective", s.objective)->check(CLI::IsMember({"median", "means", "center"}));
  sol->add_option("--metric", s.metric)->check(CLI::IsMember({"auto", "euclidean", "l1", "polyhedral"}));
  sol->add_option("--eps", s.eps, "polyhedral approximation parameter");
  sol->add_option("--algorithm", s.algorithm)->check(CLI::IsMember({"dp", "local", "coreset", "oracle"}));
  auto* eng = sol->add_option("--engine", s.engine)->check(CLI::IsMember({"naive", "accelerated"}));
  auto* ini = sol->add_option("--init", s.init)->check(CLI::IsMember({"gonzalez", "random"}));
  sol->add_option("--seed", s.seed);
  sol->add_option("--coreset-eps", s.coreset_eps);
  sol->add_option("--instance", s.instance, "sidecar JSON of a generated instance");
  sol->add_option("--dump-merge-tree", s.dump_tree, "write the merge tree as JSON");
  sol->add_option("--output,-o", s.output);
  sol->add_flag("--no-timings", s.no_timings);
  sol->add_flag("--cross-check", s.cross_check, "compare against the brute-force oracle when feasible");

  VerifyArgs v;
  auto* ver = app.add_subcommand("verify", "check center proximity and separation properties");
  ver->add_option("--input,-i", v.input)->required();
  ver->add_option("--instance", v.instance, "sidecar JSON (labels, centers, alpha_target)");
  ver->add_option("--labels", v.labels, "result JSON whose labels/centers are checked");
  ver->add_option("--alpha", v.alpha);
  ver->add_option("--metric", v.metric)->check(CLI::IsMember({"euclidean", "l1", "polyhedral"}));
  ver->add_option("--eps", v.eps);
  ver->add_option("--objective", v.objective, "objective used to derive centers when none are given")
      ->check(CLI::IsMember({"median", "means", "center"}));
  ver->add_option("--output,-o", v.output);

  BenchArgs b;
  auto* ben = app.add_subcommand("bench", "time a solver over growing n");
  ben->add_option("--algorithm", b.algorithm)->check(CLI::IsMember({"dp", "local"}));
  ben->add_option("--k", b.k);
  ben->add_option("--n", b.sizes, "comma-separated sizes");
  ben->add_option("--d", b.d);
  ben->add_option("--alpha", b.alpha);
  ben->add_option("--reps", b.reps);
  ben->add_option("--seed", b.seed);
  ben->add_option("--objective", b.objective)->check(CLI::IsMember({"median", "means", "center"}));
  ben->add_option("--metric", b.metric)->check(CLI::IsMember({"auto", "euclidean", "l1", "polyhedral"}));
  ben->add_option("--eps", b.eps);
  ben->add_option("--engine", b.engine)->check(CLI::IsMember({"naive", "accelerated"}));
  ben->add_option("--output,-o", b.output, "JSON output path");
  ben->add_flag("--no-timings", b.no_timings);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  s.engine_set = eng->count() > 0;
  s.init_set = ini->count() > 0;

  try {
    const unsigned threads = resolve_threads(threads_flag);
    if (gen->parsed()) return run_generate(g);
    if (sol->parsed()) return run_solve(s, threads);
    if (ver->parsed()) return run_verify(v);
    if (ben->parsed()) return run_bench(b, threads);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedEngineError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
