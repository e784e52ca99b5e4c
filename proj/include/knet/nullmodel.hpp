#pragma once

// Degree-preserving randomization of DAGs along a random topological order.
//
// A fresh random topological sort is drawn, then nodes are visited oldest
// first. Each node draws its out-stubs from the pool of in-stubs left by the
// nodes already visited, and only afterwards adds its own in-stubs. Targets
// therefore always precede their source in the order, so the result is
// acyclic and every (k_out, k_in) pair is kept.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "knet/graph.hpp"
#include "knet/parallel.hpp"
#include "knet/rng.hpp"
#include "knet/stats.hpp"
#include "knet/topo.hpp"

namespace knet::null {

struct RandomizeOptions {
  int max_retries = 100;        // redraws per stub before accepting a duplicate
  std::size_t swap_factor = 10;  // repair gives up after swap_factor * M attempts
  int restarts = 10;             // fresh orders tried after a failed repair
};

namespace detail {

inline std::uint64_t edge_key(NodeId s, NodeId t) { return (static_cast<std::uint64_t>(s) << 32) | t; }

// One draw along one random order; nullopt when the repair budget runs out.
inline std::optional<std::vector<Edge>> draw_edges(const Dag& g, std::uint64_t seed, const RandomizeOptions& opt) {
  const auto n = g.node_count();
  const auto m = g.edge_count();
  const auto order = topological_sort(g, seed);
  std::vector<std::size_t> position(n);
  for (std::size_t k = 0; k < n; ++k) position[order[k]] = k;

  // Separate stream from the one used for the sort.
  Rng rng(derive_seed(seed, 0x9e3779b97f4a7c15ULL));
  std::vector<NodeId> pool;  // one entry per free in-stub
  pool.reserve(m);
  std::vector<Edge> edges;
  edges.reserve(m);
  std::unordered_map<std::uint64_t, int> multiplicity;
  multiplicity.reserve(2 * m);
  auto count = [&](NodeId s, NodeId t) {
    auto it = multiplicity.find(detail::edge_key(s, t));
    return it == multiplicity.end() ? 0 : it->second;
  };
  std::vector<std::size_t> duplicates;  // indices into `edges` of repeated pairs

  for (NodeId v : order) {
    for (std::size_t s = 0; s < g.out_degree(v); ++s) {
      if (pool.empty()) throw Error("stub pool exhausted; input is not consistent with its order");
      std::size_t pick = uniform_index(rng, pool.size());
      for (int retry = 0; retry < opt.max_retries && count(v, pool[pick]) > 0; ++retry)
        pick = uniform_index(rng, pool.size());
      const NodeId t = pool[pick];
      pool[pick] = pool.back();
      pool.pop_back();
      if (++multiplicity[detail::edge_key(v, t)] > 1) duplicates.push_back(edges.size());
      edges.push_back({v, t});
    }
    for (std::size_t s = 0; s < g.in_degree(v); ++s) pool.push_back(v);
  }

  // Repair: swap each duplicate (v, t) with a random edge (x, y) into (v, y),
  // (x, t), provided both stay order-consistent and simple.
  std::size_t attempts = 0;
  const std::size_t budget = opt.swap_factor * std::max<std::size_t>(m, 1);
  for (std::size_t d : duplicates) {
    // An earlier swap may already have moved this copy.
    while (count(edges[d].source, edges[d].target) > 1) {
      if (++attempts > budget) return std::nullopt;
      const std::size_t o = uniform_index(rng, edges.size());
      const auto [v, t] = edges[d];
      const auto [x, y] = edges[o];
      if (o == d || v == x) continue;
      if (!(position[y] < position[v] && position[t] < position[x])) continue;
      if (count(v, y) > 0 || count(x, t) > 0) continue;
      --multiplicity[detail::edge_key(v, t)];
      --multiplicity[detail::edge_key(x, y)];
      ++multiplicity[detail::edge_key(v, y)];
      ++multiplicity[detail::edge_key(x, t)];
      edges[d] = {v, y};
      edges[o] = {x, t};
    }
  }

  return edges;
}

}  // namespace detail

// Attempt k > 0 reseeds both the order and the draws.
inline Dag randomize_dag(const Dag& g, std::uint64_t seed, const RandomizeOptions& opt = {}) {
  std::optional<std::vector<Edge>> edges;
  for (int k = 0; k <= opt.restarts && !edges; ++k)
    edges = detail::draw_edges(g, k == 0 ? seed : derive_seed(seed, 0xd1b54a32d192ed03ULL * static_cast<std::uint64_t>(k)), opt);
  if (!edges)
    throw Error("null model repair failed after " + std::to_string(opt.swap_factor) + " x M swaps on " +
                std::to_string(opt.restarts + 1) + " orders; graph is pathological");
  auto built = build(g.node_count(), *edges, g.attributes());
  if (built.duplicates_dropped != 0 || !built.rejected_self_loops.empty())
    throw Error("null model produced a non-simple graph");
  return Dag::finalize(std::move(built.graph));
}

using Metric = std::function<double(const Dag&)>;

struct Realization {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
};

struct NullEnsemble {
  std::string metric;
  std::uint64_t base_seed = 0;
  std::vector<Realization> realizations;

  std::vector<double> values() const {
    std::vector<double> v;
    for (const auto& r : realizations) v.push_back(r.value);
    return v;
  }
};

// Realization i is randomize_dag(g, base_seed + i). Realizations run in
// parallel; results are stored by index.
inline NullEnsemble ensemble(const Dag& g, std::size_t size, std::uint64_t base_seed, const Metric& metric,
                             std::string metric_name = "metric", unsigned threads = default_threads()) {
  NullEnsemble out{std::move(metric_name), base_seed, std::vector<Realization>(size)};
  parallel_for(size, threads, [&](std::size_t i) {
    const auto seed = derive_seed(base_seed, i);
    out.realizations[i] = {i, seed, metric(randomize_dag(g, seed))};
  }, 1);
  return out;
}

// (real - mean(null)) / sample_stddev(null); absent for fewer than two values
// or zero spread.
inline std::optional<double> zscore(double real_value, std::span<const double> null_values) {
  if (null_values.size() < 2) return std::nullopt;
  const double sd = stats::sample_stddev(null_values);
  if (sd == 0.0 || !std::isfinite(sd)) return std::nullopt;
  return (real_value - stats::mean(null_values)) / sd;
}

}  // namespace knet::null
