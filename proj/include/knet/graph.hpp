#pragma once

// Simple directed graphs and DAGs in compressed sparse row form.
//
// Edge (i, j) means i cites (uses) j: links point from newer entities to
// older ones. successors(i) are i's references, predecessors(i) its citers.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "knet/date.hpp"
#include "knet/error.hpp"

namespace knet {

using NodeId = std::uint32_t;

struct Edge {
  NodeId source = 0;
  NodeId target = 0;
  auto operator<=>(const Edge&) const = default;
};

// Binary membership vector over subject fields (at most 32 dimensions).
struct FieldVector {
  std::uint32_t bits = 0;

  bool empty() const noexcept { return bits == 0; }
  int count() const noexcept { return std::popcount(bits); }
  bool test(int dim) const noexcept { return (bits >> dim) & 1u; }
  auto operator<=>(const FieldVector&) const = default;
};

// Optional per-node metadata. Each vector is either empty (attribute absent)
// or has exactly node_count entries.
struct NodeAttributes {
  std::vector<std::string> labels;
  std::vector<std::optional<Date>> dates;
  std::vector<std::optional<FieldVector>> fields;
  std::vector<std::int64_t> external_ids;

  bool has_labels() const noexcept { return !labels.empty(); }
  bool has_dates() const noexcept { return !dates.empty(); }
  bool has_fields() const noexcept { return !fields.empty(); }
  bool has_external_ids() const noexcept { return !external_ids.empty(); }

  // Attributes of the nodes listed in `keep`, in that order.
  NodeAttributes subset(std::span<const NodeId> keep) const {
    NodeAttributes out;
    auto pick = [&](const auto& src, auto& dst) {
      if (src.empty()) return;
      dst.reserve(keep.size());
      for (NodeId v : keep) dst.push_back(src[v]);
    };
    pick(labels, out.labels);
    pick(dates, out.dates);
    pick(fields, out.fields);
    pick(external_ids, out.external_ids);
    return out;
  }

  void resize(std::size_t n) {
    if (has_labels()) labels.resize(n);
    if (has_dates()) dates.resize(n);
    if (has_fields()) fields.resize(n);
    if (has_external_ids()) external_ids.resize(n);
  }
};

class GraphBuilder;

// Immutable simple directed graph: no self-loops, no parallel edges.
class Digraph {
public:
  Digraph() = default;

  std::size_t node_count() const noexcept { return out_offsets_.empty() ? 0 : out_offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return out_targets_.size(); }

  std::span<const NodeId> successors(NodeId v) const {
    return {out_targets_.data() + out_offsets_[v], out_targets_.data() + out_offsets_[v + 1]};
  }
  std::span<const NodeId> predecessors(NodeId v) const {
    return {in_sources_.data() + in_offsets_[v], in_sources_.data() + in_offsets_[v + 1]};
  }
  std::size_t out_degree(NodeId v) const { return out_offsets_[v + 1] - out_offsets_[v]; }
  std::size_t in_degree(NodeId v) const { return in_offsets_[v + 1] - in_offsets_[v]; }
  std::size_t degree(NodeId v) const { return out_degree(v) + in_degree(v); }

  bool has_edge(NodeId s, NodeId t) const {
    auto succ = successors(s);
    return std::binary_search(succ.begin(), succ.end(), t);
  }

  // All edges, sorted by (source, target).
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId v = 0; v < node_count(); ++v)
      for (NodeId t : successors(v)) out.push_back({v, t});
    return out;
  }

  const NodeAttributes& attributes() const noexcept { return attrs_; }

  Digraph with_attributes(NodeAttributes attrs) const& {
    Digraph copy = *this;
    copy.set_attributes(std::move(attrs));
    return copy;
  }
  Digraph with_attributes(NodeAttributes attrs) && {
    set_attributes(std::move(attrs));
    return std::move(*this);
  }

  friend bool operator==(const Digraph& a, const Digraph& b) {
    return a.out_offsets_ == b.out_offsets_ && a.out_targets_ == b.out_targets_;
  }

private:
  friend class GraphBuilder;

  void set_attributes(NodeAttributes attrs) {
    const auto n = node_count();
    auto check = [n](std::size_t size) {
      if (size != 0 && size != n) throw Error("node attribute vector does not match node count");
    };
    check(attrs.labels.size());
    check(attrs.dates.size());
    check(attrs.fields.size());
    check(attrs.external_ids.size());
    attrs_ = std::move(attrs);
  }

  std::vector<std::size_t> out_offsets_;
  std::vector<NodeId> out_targets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeId> in_sources_;
  NodeAttributes attrs_;
};

struct BuildResult {
  Digraph graph;
  std::size_t duplicates_dropped = 0;
  std::vector<Edge> rejected_self_loops;
};

class GraphBuilder {
public:
  explicit GraphBuilder(std::size_t node_count) : n_(node_count) {}

  std::size_t node_count() const noexcept { return n_; }

  // Adds a node and returns its id.
  NodeId add_node() { return static_cast<NodeId>(n_++); }

  void add_edge(NodeId source, NodeId target) {
    if (source >= n_ || target >= n_)
      throw Error("edge (" + std::to_string(source) + ", " + std::to_string(target) +
                  ") out of range for " + std::to_string(n_) + " nodes");
    if (source == target) {
      self_loops_.push_back({source, target});
      return;
    }
    edges_.push_back({source, target});
  }

  void reserve(std::size_t m) { edges_.reserve(m); }

  BuildResult build(NodeAttributes attrs = {}) && {
    std::sort(edges_.begin(), edges_.end());
    auto last = std::unique(edges_.begin(), edges_.end());
    BuildResult result;
    result.duplicates_dropped = static_cast<std::size_t>(edges_.end() - last);
    edges_.erase(last, edges_.end());
    result.rejected_self_loops = std::move(self_loops_);

    Digraph& g = result.graph;
    g.out_offsets_.assign(n_ + 1, 0);
    g.in_offsets_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
      ++g.out_offsets_[e.source + 1];
      ++g.in_offsets_[e.target + 1];
    }
    for (std::size_t v = 0; v < n_; ++v) {
      g.out_offsets_[v + 1] += g.out_offsets_[v];
      g.in_offsets_[v + 1] += g.in_offsets_[v];
    }
    g.out_targets_.resize(edges_.size());
    g.in_sources_.resize(edges_.size());
    std::vector<std::size_t> in_fill(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
    // Edges are sorted by source, so both adjacency arrays come out sorted.
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      g.out_targets_[k] = edges_[k].target;
      g.in_sources_[in_fill[edges_[k].target]++] = edges_[k].source;
    }
    edges_.clear();
    g.set_attributes(std::move(attrs));
    return result;
  }

private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<Edge> self_loops_;
};

inline BuildResult build(std::size_t node_count, std::span<const Edge> edges, NodeAttributes attrs = {}) {
  GraphBuilder b(node_count);
  b.reserve(edges.size());
  for (const Edge& e : edges) b.add_edge(e.source, e.target);
  return std::move(b).build(std::move(attrs));
}

inline BuildResult build(std::size_t node_count, std::initializer_list<Edge> edges, NodeAttributes attrs = {}) {
  return build(node_count, std::span<const Edge>(edges.begin(), edges.size()), std::move(attrs));
}

// Returns one edge lying on a directed cycle, or nullopt if the graph is acyclic.
inline std::optional<Edge> find_cycle_edge(const Digraph& g) {
  const auto n = g.node_count();
  // Kahn on out-degree: peel nodes whose references are all peeled.
  std::vector<std::size_t> remaining(n);
  std::vector<NodeId> stack;
  for (NodeId v = 0; v < n; ++v) {
    remaining[v] = g.out_degree(v);
    if (remaining[v] == 0) stack.push_back(v);
  }
  std::size_t peeled = 0;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    ++peeled;
    for (NodeId u : g.predecessors(v))
      if (--remaining[u] == 0) stack.push_back(u);
  }
  if (peeled == n) return std::nullopt;
  // Every unpeeled node has an unpeeled successor; walk until a node repeats.
  std::vector<char> seen(n, 0);
  NodeId v = 0;
  while (remaining[v] == 0) ++v;
  for (;;) {
    seen[v] = 1;
    NodeId next = v;
    for (NodeId t : g.successors(v))
      if (remaining[t] != 0) {
        next = t;
        break;
      }
    if (seen[next]) return Edge{v, next};
    v = next;
  }
}

inline bool is_acyclic(const Digraph& g) { return !find_cycle_edge(g).has_value(); }

// A Digraph that has been checked to contain no directed cycle.
class Dag : public Digraph {
public:
  Dag() = default;

  static Dag finalize(Digraph g) {
    if (auto e = find_cycle_edge(g)) throw CycleError(e->source, e->target);
    return Dag(std::move(g));
  }

  Dag with_attributes(NodeAttributes attrs) const& { return Dag(Digraph::with_attributes(std::move(attrs))); }
  Dag with_attributes(NodeAttributes attrs) && {
    return Dag(static_cast<Digraph&&>(*this).with_attributes(std::move(attrs)));
  }

private:
  explicit Dag(Digraph g) : Digraph(std::move(g)) {}
};

inline Dag make_dag(std::size_t node_count, std::span<const Edge> edges, NodeAttributes attrs = {}) {
  return Dag::finalize(build(node_count, edges, std::move(attrs)).graph);
}

inline Dag make_dag(std::size_t node_count, std::initializer_list<Edge> edges, NodeAttributes attrs = {}) {
  return make_dag(node_count, std::span<const Edge>(edges.begin(), edges.size()), std::move(attrs));
}

struct Subgraph {
  Digraph graph;
  std::vector<NodeId> original;  // new id -> id in the parent graph
};

// Induced subgraph on `keep` (ids in the parent graph). New ids follow the
// order of `keep`.
inline Subgraph induced_subgraph(const Digraph& g, std::span<const NodeId> keep) {
  constexpr NodeId kAbsent = ~NodeId{0};
  std::vector<NodeId> remap(g.node_count(), kAbsent);
  for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<NodeId>(i);
  GraphBuilder b(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (NodeId t : g.successors(keep[i]))
      if (remap[t] != kAbsent) b.add_edge(static_cast<NodeId>(i), remap[t]);
  Subgraph out;
  out.graph = std::move(b).build(g.attributes().subset(keep)).graph;
  out.original.assign(keep.begin(), keep.end());
  return out;
}

// Copy of `g` without the listed edges (which must be sorted).
inline Digraph without_edges(const Digraph& g, std::span<const Edge> removed_sorted) {
  GraphBuilder b(g.node_count());
  b.reserve(g.edge_count());
  for (NodeId v = 0; v < g.node_count(); ++v)
    for (NodeId t : g.successors(v))
      if (!std::binary_search(removed_sorted.begin(), removed_sorted.end(), Edge{v, t})) b.add_edge(v, t);
  return std::move(b).build(g.attributes()).graph;
}

}  // namespace knet
