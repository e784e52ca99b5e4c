#pragma once

// Cleaning pipeline for raw citation data: isolates, largest component, cycles.

#include <vector>

#include "knet/graph.hpp"
#include "knet/topo.hpp"

namespace knet {

struct CleaningReport {
  std::size_t input_nodes = 0;
  std::size_t input_edges = 0;
  std::size_t isolates_removed = 0;
  std::size_t component_nodes_kept = 0;
  std::size_t date_violations_removed = 0;
  std::size_t back_edges_removed = 0;
  // Nodes cut off by cycle removal and dropped to keep the result connected.
  std::size_t post_cycle_nodes_dropped = 0;
  std::size_t output_nodes = 0;
  std::size_t output_edges = 0;
};

struct CleanResult {
  Dag dag;
  std::vector<NodeId> original;  // node in `dag` -> node in the input graph
  std::vector<Edge> removed_edges;  // in input ids
  CleaningReport report;
};

inline std::vector<NodeId> non_isolated_nodes(const Digraph& g) {
  std::vector<NodeId> keep;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (g.degree(v) > 0) keep.push_back(v);
  return keep;
}

// Isolates -> largest weakly connected component -> cycle removal (date phase,
// then DFS back edges). If removing edges disconnects the graph, the largest
// component of the acyclic graph is kept.
inline CleanResult clean(const Digraph& input) {
  CleanResult out;
  auto& rep = out.report;
  rep.input_nodes = input.node_count();
  rep.input_edges = input.edge_count();

  auto compose = [](std::vector<NodeId>& outer, const std::vector<NodeId>& inner) {
    std::vector<NodeId> composed(inner.size());
    for (std::size_t k = 0; k < inner.size(); ++k) composed[k] = outer[inner[k]];
    outer = std::move(composed);
  };

  auto kept = non_isolated_nodes(input);
  rep.isolates_removed = input.node_count() - kept.size();
  if (kept.empty()) throw Error("cleaning removed every node");
  Subgraph stage = induced_subgraph(input, kept);
  std::vector<NodeId> original = stage.original;

  auto comp = largest_weakly_connected_component(stage.graph);
  compose(original, comp.original);
  rep.component_nodes_kept = comp.graph.node_count();

  auto broken = break_cycles(comp.graph);
  rep.date_violations_removed = broken.date_violations.size();
  rep.back_edges_removed = broken.back_edges.size();
  for (const auto* list : {&broken.date_violations, &broken.back_edges})
    for (const Edge& e : *list) out.removed_edges.push_back({original[e.source], original[e.target]});
  std::sort(out.removed_edges.begin(), out.removed_edges.end());

  Digraph acyclic = std::move(broken.dag);
  auto final_nodes = largest_component_nodes(acyclic);
  if (final_nodes.size() != acyclic.node_count()) {
    rep.post_cycle_nodes_dropped = acyclic.node_count() - final_nodes.size();
    auto sub = induced_subgraph(acyclic, final_nodes);
    compose(original, sub.original);
    acyclic = std::move(sub.graph);
  }
  out.dag = Dag::finalize(std::move(acyclic));
  out.original = std::move(original);
  rep.output_nodes = out.dag.node_count();
  rep.output_edges = out.dag.edge_count();
  return out;
}

}  // namespace knet
