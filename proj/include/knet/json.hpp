#pragma once

// JSON views of the report types (nlohmann/json).

#include <optional>

#include <json.hpp>

#include "knet/clean.hpp"
#include "knet/metrics.hpp"
#include "knet/stats.hpp"

namespace knet {

template <class T>
nlohmann::json opt_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const CleaningReport& r) {
  return {{"input_nodes", r.input_nodes},
          {"input_edges", r.input_edges},
          {"isolates_removed", r.isolates_removed},
          {"component_nodes_kept", r.component_nodes_kept},
          {"date_violations_removed", r.date_violations_removed},
          {"back_edges_removed", r.back_edges_removed},
          {"post_cycle_nodes_dropped", r.post_cycle_nodes_dropped},
          {"output_nodes", r.output_nodes},
          {"output_edges", r.output_edges}};
}

inline nlohmann::json to_json(const stats::CorrelationResult& c) {
  return {{"kind", stats::to_string(c.kind)},
          {"coefficient", opt_json(c.coefficient)},
          {"p_value", opt_json(c.p_value)},
          {"n", c.n}};
}

inline nlohmann::json to_json(const std::optional<metrics::PathLength>& p) {
  if (!p) return nullptr;
  return {{"mean", p->mean}, {"pairs", p->pairs}, {"sampled", p->sampled}};
}

inline nlohmann::json to_json(const metrics::MetricsReport& r) {
  nlohmann::json j;
  j["node_count"] = r.node_count;
  j["link_count"] = r.link_count;
  j["density"] = r.density;
  j["max_degree"] = r.max_degree;
  j["max_out_degree"] = r.max_out_degree;
  j["max_in_degree"] = r.max_in_degree;
  j["average_degree"] = r.average_degree;
  j["average_path_length"] = {{"directed_reachable", to_json(r.path_length_directed)},
                              {"undirected", to_json(r.path_length_undirected)}};
  j["clustering"] = {{"global_undirected", r.clustering_global_undirected},
                     {"global_directed", r.clustering_global_directed},
                     {"average_undirected", r.clustering_average_undirected},
                     {"average_directed", r.clustering_average_directed}};
  j["assortativity"] = {{"undirected", opt_json(r.assortativity_undirected)},
                        {"out-out", opt_json(r.assortativity_out_out)},
                        {"out-in", opt_json(r.assortativity_out_in)},
                        {"in-out", opt_json(r.assortativity_in_out)},
                        {"in-in", opt_json(r.assortativity_in_in)}};
  j["self_degree_spearman"] = r.self_degree_spearman ? to_json(*r.self_degree_spearman) : nlohmann::json(nullptr);
  return j;
}

}  // namespace knet
