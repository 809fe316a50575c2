#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stable_cluster/clustering.hpp"
#include "stable_cluster/coreset.hpp"
#include "stable_cluster/dp_solver.hpp"
#include "stable_cluster/errors.hpp"
#include "stable_cluster/local_search.hpp"
#include "stable_cluster/mst.hpp"
#include "stable_cluster/stability_lab.hpp"

namespace stable_cluster {

using json = nlohmann::ordered_json;

inline json metric_json(const MetricSpec& m) {
  json j{{"kind", m.name()}};
  if (m.kind == MetricKind::polyhedral && m.directions) {
    j["epsilon"] = m.directions->epsilon();
    j["directions"] = m.directions->size();
  }
  return j;
}

inline json point_json(const Point& p) { return json(p); }

inline json clustering_json(const Clustering& c) {
  json centers = json::array();
  for (const auto& p : c.centers) centers.push_back(point_json(p));
  return json{{"objective", to_string(c.objective)},
              {"total_cost", c.total_cost},
              {"per_cluster_cost", c.per_cluster_cost},
              {"centers", centers},
              {"labels", c.labels}};
}

// Merges the clustering fields into a result record.
inline void put_clustering(json& j, const Clustering& c) {
  const json cj = clustering_json(c);
  for (const auto& [key, val] : cj.items()) j[key] = val;
}

inline json dp_result_json(const DpResult& r, const MetricSpec& m, std::size_t k, bool timings) {
  json j{{"algorithm", "dp"}, {"objective", to_string(r.clustering.objective)}, {"metric", metric_json(m)},
         {"k", k}, {"n", r.clustering.labels.size()}};
  put_clustering(j, r.clustering);
  const std::size_t n = r.clustering.labels.size();
  j["insertions"] = r.insertions;
  j["insertion_bound"] = n * ceil_log2(n);
  if (timings) j["timings"] = json{{"mst_ms", r.mst_ms}, {"dp_ms", r.dp_ms}};
  return j;
}

inline json local_search_json(const LocalSearchResult& r, SwapEngine e, const MetricSpec& m, std::size_t k) {
  json swaps = json::array();
  for (const auto& s : r.swaps) swaps.push_back(json{{"x", s.x}, {"y", s.y}, {"cost", s.cost}});
  json j{{"algorithm", "local_search"}, {"engine", to_string(e)}, {"metric", metric_json(m)}, {"k", k},
         {"n", r.clustering.labels.size()}, {"iterations", r.iterations}, {"swaps", swaps},
         {"initial_centers", r.initial.ids}, {"final_centers", r.final_centers.ids}};
  put_clustering(j, r.clustering);
  return j;
}

inline json coreset_json(const CoresetSolveResult& r, const MetricSpec& m, std::size_t k) {
  json j{{"algorithm", "coreset"}, {"metric", metric_json(m)}, {"k", k}, {"n", r.clustering.labels.size()},
         {"epsilon", r.coreset.epsilon}, {"coreset_size", r.coreset.members.size()},
         {"subsets_evaluated", r.subsets_evaluated}, {"representatives", r.representatives}};
  put_clustering(j, r.clustering);
  return j;
}

inline json oracle_json(const OracleResult& r, const MetricSpec& m, std::size_t k) {
  json j{{"algorithm", "oracle"},
         {"mode", r.mode == OracleMode::partition ? "partition" : "discrete_centers"},
         {"metric", metric_json(m)},
         {"k", k},
         {"n", r.clustering.labels.size()},
         {"unique", r.unique},
         {"evaluated", r.evaluated}};
  put_clustering(j, r.clustering);
  return j;
}

inline json merge_tree_json(const MergeTree& t) {
  json nodes = json::array();
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    const auto& nd = t.nodes[v];
    json e = nullptr;
    if (nd.split_edge) e = json{{"i", nd.split_edge->i}, {"j", nd.split_edge->j}, {"w", nd.split_edge->w}};
    json ch = nd.leaf ? json::array() : json(nd.children);
    nodes.push_back(json{{"id", v}, {"split_edge", e}, {"children", ch}, {"size", nd.size}});
  }
  return json{{"n", t.n}, {"root", t.root}, {"nodes", nodes}};
}

inline json check_json(const PropertyCheck& p) {
  json j{{"name", p.name}, {"applicable", p.applicable}, {"passed", p.passed}, {"tuples", p.tuples}};
  j["worst_ratio"] = std::isfinite(p.worst_ratio) ? json(p.worst_ratio) : json(nullptr);
  return j;
}

inline json certificate_json(const Certificate& c, double alpha) {
  json props = json::array();
  for (const auto& p : c.separation.properties) props.push_back(check_json(p));
  const double ca = c.proximity.certified_alpha;
  return json{{"alpha", alpha},
              {"passed", c.passed},
              {"center_proximity",
               {{"passed", c.proximity.passed},
                {"certified_alpha", std::isfinite(ca) ? json(ca) : json(nullptr)},
                {"violations", c.proximity.violations}}},
              {"separation", {{"passed", c.separation.passed}, {"sampled", c.separation.sampled},
                              {"properties", props}}}};
}

inline json instance_sidecar_json(const StableInstance& s) {
  json centers = json::array();
  for (const auto& p : s.ground_truth.centers) centers.push_back(point_json(p));
  return json{{"k", s.ground_truth.centers.size()},
              {"n", s.points.size()},
              {"d", s.points.dim()},
              {"alpha_target", s.alpha_target},
              {"radius", s.radius},
              {"seed", s.seed},
              {"spread", s.spread},
              {"ground_truth", {{"labels", s.ground_truth.labels}, {"centers", centers}}},
              {"certificate", certificate_json(s.certificate, s.alpha_target)}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("malformed JSON in " + path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

// Labels and centers from a sidecar ({ground_truth: {...}}) or a result record.
struct LabeledCenters {
  std::vector<std::size_t> labels;
  std::vector<Point> centers;
};

inline LabeledCenters labels_from_json(const json& j) {
  const json& src = j.contains("ground_truth") ? j.at("ground_truth") : j;
  try {
    LabeledCenters out;
    out.labels = src.at("labels").get<std::vector<std::size_t>>();
    if (src.contains("centers")) out.centers = src.at("centers").get<std::vector<Point>>();
    return out;
  } catch (const json::exception& e) {
    throw IoError(std::string("missing labels: ") + e.what());
  }
}

}  // namespace stable_cluster
