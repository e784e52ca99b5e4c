#pragma once

// Growth model mixing logical and societal links.
//
// Every step adds one node with a random binary field vector and runs
// process A until it stops:
//   1. the local world is every existing node whose field vector has cosine
//      similarity > w with the new node (all nodes if none qualifies);
//   2. a target is drawn from it with probability proportional to k_in + a
//      and linked (Logical) unless already linked;
//   3. each predecessor and successor of the target is linked (Societal)
//      independently with probability q, skipping existing links;
//   4. process A stops with probability p, otherwise repeats.
// At q = 0 only logical links exist.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "knet/graph.hpp"
#include "knet/io.hpp"
#include "knet/parallel.hpp"
#include "knet/rng.hpp"

namespace knet::gen {

struct GenParams {
  double p = 0.5;  // stop probability of process A
  double w = 0.0;  // logical threshold on cosine similarity
  double a = 1.0;  // initial attractiveness
  double q = 0.0;  // human influence factor
  int dims = 10;
  double vector_density = 0.3;
  std::size_t target_n = 0;
  std::uint64_t seed = 0;
};

inline void validate(const GenParams& prm) {
  if (!(prm.p > 0.0 && prm.p <= 1.0)) throw Error("p must lie in (0, 1]");
  if (!(prm.w >= 0.0 && prm.w <= 1.0)) throw Error("w must lie in [0, 1]");
  if (!(prm.a >= 0.0)) throw Error("a must be nonnegative");
  if (!(prm.q >= 0.0 && prm.q <= 1.0)) throw Error("q must lie in [0, 1]");
  if (prm.dims < 1 || prm.dims > 16) throw Error("dims must lie in [1, 16]");
  if (!(prm.vector_density > 0.0 && prm.vector_density < 1.0)) throw Error("vector_density must lie in (0, 1)");
}

inline double cosine_similarity(FieldVector u, FieldVector v) {
  if (u.empty() || v.empty()) throw Error("cosine similarity of a zero vector");
  const int dot = std::popcount(u.bits & v.bits);
  return static_cast<double>(dot) / std::sqrt(static_cast<double>(u.count()) * static_cast<double>(v.count()));
}

// Each bit is on with probability `density`; all-zero draws are redrawn.
inline FieldVector random_field_vector(Rng& rng, int dims, double density) {
  for (;;) {
    FieldVector f;
    for (int d = 0; d < dims; ++d)
      if (bernoulli(rng, density)) f.bits |= 1u << d;
    if (!f.empty()) return f;
  }
}

struct LabeledDag {
  Dag dag;
  std::vector<LinkInfo> links;  // in dag.edges() order
  std::size_t seed_nodes = 0;   // nodes [0, seed_nodes) came from the seed graph
};

// Small starting network used when no seed graph is supplied: the first
// `axioms` nodes have no references, every later node cites 1 + Geometric
// (mean `mean_refs`) distinct earlier nodes chosen uniformly.
inline Dag default_seed_graph(std::size_t n = 100, std::uint64_t seed = 1, int dims = 10, double density = 0.3,
                              std::size_t axioms = 10, double mean_refs = 3.0) {
  if (n <= axioms) throw Error("seed graph must have more nodes than axioms");
  Rng rng(seed);
  GraphBuilder b(n);
  NodeAttributes attrs;
  for (std::size_t v = 0; v < n; ++v) attrs.fields.push_back(random_field_vector(rng, dims, density));
  for (std::size_t v = axioms; v < n; ++v) {
    std::size_t k = 1;
    while (k < v && !bernoulli(rng, 1.0 / mean_refs)) ++k;
    std::vector<NodeId> earlier(v);
    std::iota(earlier.begin(), earlier.end(), NodeId{0});
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + uniform_index(rng, v - i);
      std::swap(earlier[i], earlier[j]);
      b.add_edge(static_cast<NodeId>(v), earlier[i]);
    }
  }
  return Dag::finalize(std::move(b).build(std::move(attrs)).graph);
}

namespace detail {

// Nodes grouped by field vector. Preferential attachment over a union of
// classes picks a class by total weight, then a member within it.
struct VectorClasses {
  explicit VectorClasses(int dims) : members(std::size_t{1} << dims), stubs(std::size_t{1} << dims) {}

  std::vector<std::vector<NodeId>> members;
  std::vector<std::vector<NodeId>> stubs;  // one entry per received link
  std::vector<std::uint32_t> nonempty;

  void add_node(NodeId v, FieldVector f) {
    if (members[f.bits].empty()) nonempty.push_back(f.bits);
    members[f.bits].push_back(v);
  }
  double weight(std::uint32_t c, double a) const {
    return static_cast<double>(stubs[c].size()) + a * static_cast<double>(members[c].size());
  }
};

inline NodeId draw_preferential(const VectorClasses& vc, const std::vector<std::uint32_t>& world, double a,
                                Rng& rng) {
  double total = 0.0;
  for (auto c : world) total += vc.weight(c, a);
  if (total <= 0.0) {
    // a = 0 and no links yet: uniform over members.
    std::size_t count = 0;
    for (auto c : world) count += vc.members[c].size();
    std::size_t k = uniform_index(rng, count);
    for (auto c : world) {
      if (k < vc.members[c].size()) return vc.members[c][k];
      k -= vc.members[c].size();
    }
  }
  double r = uniform01(rng) * total;
  std::uint32_t chosen = world.back();
  for (auto c : world) {
    const double wgt = vc.weight(c, a);
    if (r < wgt) {
      chosen = c;
      break;
    }
    r -= wgt;
  }
  const double stub_weight = static_cast<double>(vc.stubs[chosen].size());
  const double within = uniform01(rng) * vc.weight(chosen, a);
  if (within < stub_weight) return vc.stubs[chosen][uniform_index(rng, vc.stubs[chosen].size())];
  return vc.members[chosen][uniform_index(rng, vc.members[chosen].size())];
}

}  // namespace detail

// Grows `seed_graph` to params.target_n nodes. Seed nodes without a field
// vector get a random one; seed links are labelled Logical with birth 0, and
// links created at step t (the t-th added node, from 1) carry birth t.
inline LabeledDag generate(const GenParams& prm, const Dag& seed_graph) {
  validate(prm);
  const std::size_t n0 = seed_graph.node_count();
  if (prm.target_n <= n0) throw Error("target_n must exceed the seed graph size");
  Rng rng(prm.seed);

  const std::size_t n = prm.target_n;
  std::vector<FieldVector> field(n);
  std::vector<std::vector<NodeId>> out_adj(n), in_adj(n);
  detail::VectorClasses classes(prm.dims);
  const auto& seed_fields = seed_graph.attributes().fields;
  const std::uint32_t mask = (prm.dims >= 32) ? ~0u : ((1u << prm.dims) - 1u);
  for (NodeId v = 0; v < n0; ++v) {
    std::optional<FieldVector> f;
    if (!seed_fields.empty()) f = seed_fields[v];
    if (f && (f->bits & mask) != f->bits) throw Error("seed field vector exceeds dims");
    field[v] = (f && !f->empty()) ? *f : random_field_vector(rng, prm.dims, prm.vector_density);
    classes.add_node(v, field[v]);
  }
  std::vector<Edge> edges;
  std::vector<LinkInfo> info;
  for (const Edge& e : seed_graph.edges()) {
    out_adj[e.source].push_back(e.target);
    in_adj[e.target].push_back(e.source);
    classes.stubs[field[e.target].bits].push_back(e.target);
    edges.push_back(e);
    info.push_back({LinkType::logical, 0});
  }

  std::vector<std::size_t> linked(n, 0);  // step stamp of the last link from the current node
  std::vector<std::uint32_t> world;
  for (std::size_t step = 1; n0 + step - 1 < n; ++step) {
    const auto v = static_cast<NodeId>(n0 + step - 1);
    field[v] = random_field_vector(rng, prm.dims, prm.vector_density);
    world.clear();
    for (auto c : classes.nonempty)
      if (cosine_similarity(field[v], FieldVector{c}) > prm.w) world.push_back(c);
    if (world.empty()) world = classes.nonempty;

    auto link = [&](NodeId t, LinkType type) {
      linked[t] = step;
      out_adj[v].push_back(t);
      in_adj[t].push_back(v);
      classes.stubs[field[t].bits].push_back(t);
      edges.push_back({v, t});
      info.push_back({type, static_cast<std::int64_t>(step)});
    };

    do {
      const NodeId target = detail::draw_preferential(classes, world, prm.a, rng);
      if (linked[target] != step) link(target, LinkType::logical);
      if (prm.q > 0.0) {
        // Snapshot sizes: links made below only touch other nodes' lists.
        const std::size_t n_in = in_adj[target].size(), n_out = out_adj[target].size();
        for (std::size_t k = 0; k < n_in + n_out; ++k) {
          const NodeId x = k < n_in ? in_adj[target][k] : out_adj[target][k - n_in];
          if (x == v || linked[x] == step) continue;
          if (bernoulli(rng, prm.q)) link(x, LinkType::societal);
        }
      }
    } while (!bernoulli(rng, prm.p));
    classes.add_node(v, field[v]);
  }

  // Sort links into edges() order.
  std::vector<std::size_t> idx(edges.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return edges[x] < edges[y]; });
  LabeledDag out;
  out.seed_nodes = n0;
  out.links.reserve(idx.size());
  for (std::size_t k : idx) out.links.push_back(info[k]);
  NodeAttributes attrs;
  for (const auto& f : field) attrs.fields.push_back(f);
  if (seed_graph.attributes().has_labels()) {
    attrs.labels = seed_graph.attributes().labels;
    attrs.labels.resize(n);
  }
  auto built = build(n, edges, std::move(attrs));
  if (built.duplicates_dropped != 0) throw Error("generator produced a duplicate link");
  out.dag = Dag::finalize(std::move(built.graph));
  return out;
}

struct LinkTypeStats {
  std::size_t logical = 0;
  std::size_t societal = 0;
  double societal_fraction = 0.0;
  // Logical out-degree histogram over generated (non-seed) nodes.
  std::vector<std::size_t> logical_out_histogram;
  double fraction_at_most_two_logical = 0.0;
};

inline LinkTypeStats link_type_stats(const LabeledDag& g) {
  LinkTypeStats s;
  const auto n = g.dag.node_count();
  std::vector<std::size_t> logical_out(n, 0);
  std::size_t k = 0;
  for (NodeId v = 0; v < n; ++v)
    for (std::size_t e = 0; e < g.dag.out_degree(v); ++e, ++k) {
      if (g.links[k].type == LinkType::logical) {
        ++s.logical;
        ++logical_out[v];
      } else {
        ++s.societal;
      }
    }
  const std::size_t total = s.logical + s.societal;
  s.societal_fraction = total ? static_cast<double>(s.societal) / static_cast<double>(total) : 0.0;
  std::size_t at_most_two = 0, generated = 0;
  for (NodeId v = static_cast<NodeId>(g.seed_nodes); v < n; ++v) {
    if (logical_out[v] >= s.logical_out_histogram.size()) s.logical_out_histogram.resize(logical_out[v] + 1, 0);
    ++s.logical_out_histogram[logical_out[v]];
    at_most_two += logical_out[v] <= 2 ? 1 : 0;
    ++generated;
  }
  s.fraction_at_most_two_logical = generated ? static_cast<double>(at_most_two) / static_cast<double>(generated) : 0.0;
  return s;
}

struct CalibrationSpace {
  std::vector<double> w_values{0.0};
  std::vector<double> a_values{1.0};
  double p_min = 0.01;
  double p_max = 1.0;
  int bisection_steps = 14;
  int realizations = 3;
  double tolerance = 0.10;  // relative error beyond which calibration fails
};

struct CalibrationResult {
  GenParams params;
  double achieved_mean_m = 0.0;
  double relative_error = 0.0;
  std::size_t evaluations = 0;
};

class CalibrationError : public Error {
public:
  CalibrationError(double lo, double hi, double target)
      : Error("target M " + std::to_string(target) + " unreachable; search space spans [" + std::to_string(lo) +
              ", " + std::to_string(hi) + "]"),
        lo_(lo), hi_(hi) {}
  double achieved_min() const noexcept { return lo_; }
  double achieved_max() const noexcept { return hi_; }

private:
  double lo_, hi_;
};

// Mean link count over `realizations` runs with seeds seed, seed + 1, ...
inline double mean_links(const GenParams& base, const Dag& seed_graph, int realizations) {
  std::vector<double> m(static_cast<std::size_t>(realizations));
  parallel_for(m.size(), default_threads(), [&](std::size_t i) {
    GenParams prm = base;
    prm.seed = derive_seed(base.seed, i);
    m[i] = static_cast<double>(generate(prm, seed_graph).dag.edge_count());
  }, 1);
  return std::accumulate(m.begin(), m.end(), 0.0) / static_cast<double>(m.size());
}

// Fits p (and picks w, a from the grid) so that the mean link count matches
// m_target. For each (w, a) the expected M is decreasing in p; p is bisected
// on a log scale between p_min and p_max.
inline CalibrationResult calibrate(GenParams fixed, const Dag& seed_graph, double m_target,
                                   const CalibrationSpace& space = {}) {
  if (!(m_target > 0.0)) throw Error("calibration target must be positive");
  CalibrationResult best;
  best.relative_error = INFINITY;
  double lo_all = INFINITY, hi_all = -INFINITY;
  std::size_t evals = 0;
  auto consider = [&](const GenParams& prm, double m) {
    const double err = std::abs(m - m_target) / m_target;
    lo_all = std::min(lo_all, m);
    hi_all = std::max(hi_all, m);
    if (err < best.relative_error) best = {prm, m, err, 0};
  };
  for (double w : space.w_values)
    for (double a : space.a_values) {
      GenParams prm = fixed;
      prm.w = w;
      prm.a = a;
      prm.p = space.p_max;
      const double m_at_max = mean_links(prm, seed_graph, space.realizations);
      ++evals;
      consider(prm, m_at_max);
      if (m_at_max == m_target) {
        best.evaluations = evals;
        return best;
      }
      if (m_at_max > m_target) continue;
      prm.p = space.p_min;
      const double m_at_min = mean_links(prm, seed_graph, space.realizations);
      ++evals;
      consider(prm, m_at_min);
      if (m_at_min < m_target) continue;
      double lo = std::log(space.p_min), hi = std::log(space.p_max);
      for (int s = 0; s < space.bisection_steps; ++s) {
        const double mid = 0.5 * (lo + hi);
        prm.p = std::exp(mid);
        const double m = mean_links(prm, seed_graph, space.realizations);
        ++evals;
        consider(prm, m);
        if (m > m_target)
          lo = mid;
        else
          hi = mid;
      }
    }
  best.evaluations = evals;
  if (best.relative_error > space.tolerance) throw CalibrationError(lo_all, hi_all, m_target);
  return best;
}

}  // namespace knet::gen
