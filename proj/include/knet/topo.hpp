#pragma once

// Orderings, generations, components and cycle removal.

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <queue>
#include <vector>

#include "knet/graph.hpp"
#include "knet/rng.hpp"

namespace knet {

// Ordering with cited (older) nodes first: for every edge (i, j), j precedes i.
// Without a seed, ties go to the smallest node id. With a seed, the next node
// is drawn uniformly from all currently available nodes.
inline std::vector<NodeId> topological_sort(const Digraph& g, std::optional<std::uint64_t> seed = std::nullopt) {
  const auto n = g.node_count();
  std::vector<std::size_t> remaining(n);
  std::vector<NodeId> order;
  order.reserve(n);

  if (seed) {
    Rng rng(*seed);
    std::vector<NodeId> ready;
    for (NodeId v = 0; v < n; ++v)
      if ((remaining[v] = g.out_degree(v)) == 0) ready.push_back(v);
    while (!ready.empty()) {
      std::size_t k = uniform_index(rng, ready.size());
      NodeId v = ready[k];
      ready[k] = ready.back();
      ready.pop_back();
      order.push_back(v);
      for (NodeId u : g.predecessors(v))
        if (--remaining[u] == 0) ready.push_back(u);
    }
  } else {
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < n; ++v)
      if ((remaining[v] = g.out_degree(v)) == 0) ready.push(v);
    while (!ready.empty()) {
      NodeId v = ready.top();
      ready.pop();
      order.push_back(v);
      for (NodeId u : g.predecessors(v))
        if (--remaining[u] == 0) ready.push(u);
    }
  }
  if (order.size() != n) {
    auto e = find_cycle_edge(g);
    throw CycleError(e->source, e->target);
  }
  return order;
}

struct GenerationAssignment {
  std::vector<int> g;
  int generation_count = 0;

  int operator[](NodeId v) const { return g[v]; }
  std::size_t size() const noexcept { return g.size(); }

  std::vector<std::size_t> generation_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(generation_count), 0);
    for (int x : g) ++sizes[static_cast<std::size_t>(x)];
    return sizes;
  }
};

// Layer of each node: 0 for nodes without references, otherwise one more than
// the deepest reference.
inline GenerationAssignment topological_generations(const Digraph& g) {
  GenerationAssignment out;
  out.g.assign(g.node_count(), 0);
  for (NodeId v : topological_sort(g)) {
    int best = -1;
    for (NodeId t : g.successors(v)) best = std::max(best, out.g[t]);
    out.g[v] = best + 1;
    out.generation_count = std::max(out.generation_count, out.g[v] + 1);
  }
  return out;
}

// Union-find over the undirected projection.
class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

  std::size_t size_of(std::size_t x) { return size_[find(x)]; }

private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

// Nodes of the largest weakly connected component, ascending. Among equally
// large components the one containing the smallest node id wins.
inline std::vector<NodeId> largest_component_nodes(const Digraph& g) {
  const auto n = g.node_count();
  if (n == 0) throw Error("largest component of an empty graph");
  DisjointSets ds(n);
  for (NodeId v = 0; v < n; ++v)
    for (NodeId t : g.successors(v)) ds.unite(v, t);
  std::size_t best_root = ds.find(0);
  std::size_t best_size = ds.size_of(0);
  // Ascending scan: a later component only wins when strictly larger.
  for (NodeId v = 1; v < n; ++v) {
    std::size_t r = ds.find(v);
    if (ds.size_of(r) > best_size) {
      best_root = r;
      best_size = ds.size_of(r);
    }
  }
  std::vector<NodeId> keep;
  keep.reserve(best_size);
  for (NodeId v = 0; v < n; ++v)
    if (ds.find(v) == best_root) keep.push_back(v);
  return keep;
}

inline Subgraph largest_weakly_connected_component(const Digraph& g) {
  auto keep = largest_component_nodes(g);
  return induced_subgraph(g, keep);
}

struct CycleBreakResult {
  Dag dag;
  std::vector<Edge> date_violations;  // removed because the target is newer
  std::vector<Edge> back_edges;       // removed by the DFS phase
};

// Removes edges until acyclic. First every edge whose target is dated strictly
// later than its source, then the back edges of a DFS that visits roots and
// successors in ascending id order.
inline CycleBreakResult break_cycles(const Digraph& input) {
  CycleBreakResult out;
  Digraph g = input;
  const auto& attrs = input.attributes();
  if (attrs.has_dates()) {
    for (NodeId v = 0; v < g.node_count(); ++v)
      for (NodeId t : g.successors(v))
        if (attrs.dates[v] && attrs.dates[t] && strictly_later(*attrs.dates[t], *attrs.dates[v]))
          out.date_violations.push_back({v, t});
    if (!out.date_violations.empty()) g = without_edges(g, out.date_violations);
  }

  const auto n = g.node_count();
  enum : char { kWhite, kGray, kBlack };
  std::vector<char> color(n, kWhite);
  std::vector<std::pair<NodeId, std::size_t>> stack;  // node, next successor index
  for (NodeId root = 0; root < n; ++root) {
    if (color[root] != kWhite) continue;
    color[root] = kGray;
    stack.push_back({root, 0});
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      auto succ = g.successors(v);
      if (next == succ.size()) {
        color[v] = kBlack;
        stack.pop_back();
        continue;
      }
      NodeId t = succ[next++];
      if (color[t] == kGray) {
        out.back_edges.push_back({v, t});
      } else if (color[t] == kWhite) {
        color[t] = kGray;
        stack.push_back({t, 0});
      }
    }
  }
  std::sort(out.back_edges.begin(), out.back_edges.end());
  if (!out.back_edges.empty()) g = without_edges(g, out.back_edges);
  out.dag = Dag::finalize(std::move(g));
  return out;
}

}  // namespace knet
