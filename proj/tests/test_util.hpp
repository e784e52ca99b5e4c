#pragma once

#include <random>
#include <vector>

#include "knet/graph.hpp"

namespace knet::fixtures {

// Random DAG: edges only from higher to lower index, then a random relabeling
// so that ids carry no order information.
inline Dag random_dag(std::mt19937_64& rng, std::size_t n, double p, bool relabel = true) {
  std::vector<NodeId> perm(n);
  for (NodeId i = 0; i < n; ++i) perm[i] = i;
  if (relabel) std::shuffle(perm.begin(), perm.end(), rng);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < i; ++j)
      if (coin(rng)) edges.push_back({perm[i], perm[j]});
  return make_dag(n, edges);
}

// Random simple digraph, possibly cyclic.
inline Digraph random_digraph(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      if (i != j && coin(rng)) edges.push_back({i, j});
  return build(n, edges).graph;
}

}  // namespace knet::fixtures
