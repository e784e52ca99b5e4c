#pragma once

// Whole-network structural statistics: degree distributions, self-degree
// correlation, clustering, assortativity, path lengths.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

#include "knet/graph.hpp"
#include "knet/parallel.hpp"
#include "knet/rng.hpp"
#include "knet/stats.hpp"

namespace knet::metrics {

enum class DegreeKind { total, in, out };

inline std::string_view to_string(DegreeKind k) {
  switch (k) {
    case DegreeKind::total: return "total";
    case DegreeKind::in: return "in";
    case DegreeKind::out: return "out";
  }
  return "total";
}

inline std::size_t degree_of(const Digraph& g, NodeId v, DegreeKind kind) {
  switch (kind) {
    case DegreeKind::in: return g.in_degree(v);
    case DegreeKind::out: return g.out_degree(v);
    case DegreeKind::total: break;
  }
  return g.degree(v);
}

inline std::vector<double> degrees(const Digraph& g, DegreeKind kind) {
  std::vector<double> d(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) d[v] = static_cast<double>(degree_of(g, v, kind));
  return d;
}

struct CcdfPoint {
  std::size_t k = 0;
  double fraction = 0.0;  // share of nodes with degree >= k
};

struct DegreeCcdf {
  DegreeKind kind = DegreeKind::total;
  std::vector<CcdfPoint> points;
};

// Survival function evaluated at every observed degree.
inline DegreeCcdf degree_ccdf(const Digraph& g, DegreeKind kind) {
  DegreeCcdf out{kind, {}};
  const auto n = g.node_count();
  if (n == 0) return out;
  std::vector<std::size_t> d(n);
  for (NodeId v = 0; v < n; ++v) d[v] = degree_of(g, v, kind);
  std::sort(d.begin(), d.end());
  for (std::size_t i = 0; i < n;) {
    out.points.push_back({d[i], static_cast<double>(n - i) / static_cast<double>(n)});
    std::size_t j = i;
    while (j < n && d[j] == d[i]) ++j;
    i = j;
  }
  return out;
}

struct Bin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
  std::optional<double> mean;    // absent for empty bins
  std::optional<double> stderr_;  // absent for bins with fewer than two members
};

struct BinnedCurve {
  std::vector<Bin> bins;
};

struct SelfDegreeCorrelation {
  BinnedCurve curve;  // mean in-degree per out-degree bin
  stats::CorrelationResult spearman;
};

inline const std::vector<double>& self_degree_bin_edges() {
  static const std::vector<double> edges{1, 3, 9, 27, 81, 243};
  return edges;
}

// Bins nodes by out-degree into [edge_k, edge_k+1) and reports the mean
// in-degree per bin with standard error sd/sqrt(count). Spearman between
// out- and in-degree uses every node.
inline SelfDegreeCorrelation self_degree_correlation(const Digraph& g,
                                                     const std::vector<double>& edges = self_degree_bin_edges()) {
  SelfDegreeCorrelation out;
  const auto outd = degrees(g, DegreeKind::out);
  const auto ind = degrees(g, DegreeKind::in);
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    std::vector<double> members;
    for (std::size_t v = 0; v < outd.size(); ++v)
      if (outd[v] >= edges[b] && outd[v] < edges[b + 1]) members.push_back(ind[v]);
    Bin bin{edges[b], edges[b + 1], members.size(), std::nullopt, std::nullopt};
    if (!members.empty()) bin.mean = stats::mean(members);
    if (members.size() >= 2) bin.stderr_ = stats::sample_stddev(members) / std::sqrt(static_cast<double>(members.size()));
    out.curve.bins.push_back(bin);
  }
  out.spearman = stats::correlate(outd, ind, stats::CorrelationKind::spearman);
  return out;
}

// Undirected projection with multiplicity: weight 2 for reciprocated pairs.
struct UndirectedProjection {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> neighbors;
  std::vector<unsigned char> weights;

  std::size_t degree(NodeId v) const { return offsets[v + 1] - offsets[v]; }
};

inline UndirectedProjection undirected_projection(const Digraph& g) {
  UndirectedProjection u;
  const auto n = g.node_count();
  u.offsets.assign(n + 1, 0);
  u.neighbors.reserve(2 * g.edge_count());
  u.weights.reserve(2 * g.edge_count());
  for (NodeId v = 0; v < n; ++v) {
    auto a = g.successors(v), b = g.predecessors(v);
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i] < b[j])) {
        u.neighbors.push_back(a[i++]);
        u.weights.push_back(1);
      } else if (i == a.size() || b[j] < a[i]) {
        u.neighbors.push_back(b[j++]);
        u.weights.push_back(1);
      } else {
        u.neighbors.push_back(a[i]);
        u.weights.push_back(2);
        ++i;
        ++j;
      }
    }
    u.offsets[v + 1] = u.neighbors.size();
  }
  return u;
}

struct TriangleCounts {
  std::vector<double> triangles;  // distinct undirected triangles at each node
  std::vector<double> weighted;   // sum over those triangles of w_ij * w_jk * w_ki
};

// Each triangle is found once by orienting edges from lower to higher
// (degree, id) rank.
inline TriangleCounts count_triangles(const UndirectedProjection& u) {
  const std::size_t n = u.offsets.size() - 1;
  auto before = [&](NodeId a, NodeId b) {
    const auto da = u.degree(a), db = u.degree(b);
    return da != db ? da < db : a < b;
  };
  TriangleCounts tc{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::vector<unsigned char> mark(n, 0);
  for (NodeId a = 0; a < n; ++a) {
    for (std::size_t k = u.offsets[a]; k < u.offsets[a + 1]; ++k)
      if (before(a, u.neighbors[k])) mark[u.neighbors[k]] = u.weights[k];
    for (std::size_t k = u.offsets[a]; k < u.offsets[a + 1]; ++k) {
      const NodeId b = u.neighbors[k];
      if (!before(a, b)) continue;
      for (std::size_t l = u.offsets[b]; l < u.offsets[b + 1]; ++l) {
        const NodeId c = u.neighbors[l];
        if (!before(b, c) || !mark[c]) continue;
        const double w = static_cast<double>(u.weights[k]) * u.weights[l] * mark[c];
        for (NodeId x : {a, b, c}) {
          tc.triangles[x] += 1.0;
          tc.weighted[x] += w;
        }
      }
    }
    for (std::size_t k = u.offsets[a]; k < u.offsets[a + 1]; ++k) mark[u.neighbors[k]] = 0;
  }
  return tc;
}

struct DirectedClustering {
  std::vector<double> per_node;
  double average = 0.0;
  double global = 0.0;
};

// Directed total clustering:
//   C_i = [(A + A^T)^3]_ii / (2 [d_i (d_i - 1) - 2 d_i^<->])
// with d_i = in + out degree and d_i^<-> the reciprocated pairs. Nodes with a
// non-positive denominator get 0. The global value divides the summed
// numerators by the summed denominators.
inline DirectedClustering clustering_directed(const Digraph& g) {
  const auto u = undirected_projection(g);
  const auto tc = count_triangles(u);
  const auto n = g.node_count();
  DirectedClustering out;
  out.per_node.assign(n, 0.0);
  double num_sum = 0.0, den_sum = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const double d = static_cast<double>(g.degree(v));
    double bidir = 0.0;
    for (std::size_t k = u.offsets[v]; k < u.offsets[v + 1]; ++k) bidir += u.weights[k] == 2 ? 1.0 : 0.0;
    const double closed = 2.0 * tc.weighted[v];
    const double den = 2.0 * (d * (d - 1.0) - 2.0 * bidir);
    if (den > 0.0) out.per_node[v] = closed / den;
    num_sum += closed;
    den_sum += std::max(0.0, den);
  }
  if (n > 0) out.average = std::accumulate(out.per_node.begin(), out.per_node.end(), 0.0) / static_cast<double>(n);
  out.global = den_sum > 0.0 ? num_sum / den_sum : 0.0;
  return out;
}

struct UndirectedClustering {
  std::vector<double> per_node;
  double average = 0.0;
  double global = 0.0;  // 3 x triangles / connected triples
};

inline UndirectedClustering clustering_undirected(const Digraph& g) {
  const auto u = undirected_projection(g);
  const auto tc = count_triangles(u);
  const auto n = g.node_count();
  UndirectedClustering out;
  out.per_node.assign(n, 0.0);
  double tri = 0.0, triples = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const double d = static_cast<double>(u.degree(v));
    if (d >= 2.0) out.per_node[v] = 2.0 * tc.triangles[v] / (d * (d - 1.0));
    tri += tc.triangles[v];
    triples += d * (d - 1.0) / 2.0;
  }
  if (n > 0) out.average = std::accumulate(out.per_node.begin(), out.per_node.end(), 0.0) / static_cast<double>(n);
  out.global = triples > 0.0 ? tri / triples : 0.0;
  return out;
}

enum class AssortativityMode { undirected, out_out, out_in, in_out, in_in };

inline std::string_view to_string(AssortativityMode m) {
  switch (m) {
    case AssortativityMode::undirected: return "undirected";
    case AssortativityMode::out_out: return "out-out";
    case AssortativityMode::out_in: return "out-in";
    case AssortativityMode::in_out: return "in-out";
    case AssortativityMode::in_in: return "in-in";
  }
  return "undirected";
}

inline constexpr AssortativityMode kAllAssortativityModes[] = {
    AssortativityMode::undirected, AssortativityMode::out_out, AssortativityMode::out_in,
    AssortativityMode::in_out, AssortativityMode::in_in};

// Pearson correlation of degrees across edge ends. Directed modes pair the
// source's degree kind (listed first) with the target's. The undirected mode
// uses the projection's degrees and counts each link in both orientations.
inline std::optional<double> assortativity(const Digraph& g, AssortativityMode mode) {
  if (g.edge_count() < 2) throw Error("assortativity needs at least two links");
  std::vector<double> xs, ys;
  if (mode == AssortativityMode::undirected) {
    const auto u = undirected_projection(g);
    for (NodeId v = 0; v < g.node_count(); ++v)
      for (std::size_t k = u.offsets[v]; k < u.offsets[v + 1]; ++k) {
        xs.push_back(static_cast<double>(u.degree(v)));
        ys.push_back(static_cast<double>(u.degree(u.neighbors[k])));
      }
  } else {
    const bool src_out = mode == AssortativityMode::out_out || mode == AssortativityMode::out_in;
    const bool dst_out = mode == AssortativityMode::out_out || mode == AssortativityMode::in_out;
    xs.reserve(g.edge_count());
    ys.reserve(g.edge_count());
    for (NodeId v = 0; v < g.node_count(); ++v)
      for (NodeId t : g.successors(v)) {
        xs.push_back(static_cast<double>(src_out ? g.out_degree(v) : g.in_degree(v)));
        ys.push_back(static_cast<double>(dst_out ? g.out_degree(t) : g.in_degree(t)));
      }
  }
  return stats::pearson_coefficient(xs, ys);
}

enum class PathInterpretation { directed_reachable, undirected };

struct PathLengthOptions {
  std::size_t exact_limit = 50'000;  // all sources up to this many nodes
  std::size_t sampled_sources = 10'000;
  std::uint64_t seed = 0;
  unsigned threads = default_threads();
};

struct PathLength {
  double mean = 0.0;
  std::uint64_t pairs = 0;  // ordered (source, target) pairs that contributed
  bool sampled = false;
};

// Mean shortest-path length over reachable ordered pairs. Undirected mode
// walks the projection, where ordered and unordered means coincide.
inline PathLength average_path_length(const Digraph& g, PathInterpretation mode, const PathLengthOptions& opt = {}) {
  const auto n = g.node_count();
  std::vector<NodeId> sources;
  PathLength out;
  if (n <= opt.exact_limit) {
    sources.resize(n);
    std::iota(sources.begin(), sources.end(), NodeId{0});
  } else {
    out.sampled = true;
    std::vector<NodeId> all(n);
    std::iota(all.begin(), all.end(), NodeId{0});
    Rng rng(opt.seed);
    shuffle(all, rng);
    sources.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(n, opt.sampled_sources)));
    std::sort(sources.begin(), sources.end());
  }
  const UndirectedProjection proj =
      mode == PathInterpretation::undirected ? undirected_projection(g) : UndirectedProjection{};
  std::vector<std::uint64_t> dist_sum(sources.size(), 0), reached(sources.size(), 0);
  const std::size_t chunk = 16;
  const unsigned workers = worker_count(sources.size(), std::max(1u, opt.threads), chunk);
  std::vector<std::vector<int>> dist(workers, std::vector<int>(n, -1));
  std::vector<std::vector<NodeId>> frontier(workers);
  parallel_for_workers(sources.size(), workers, [&](std::size_t idx, unsigned w) {
    auto& d = dist[w];
    auto& q = frontier[w];
    const NodeId s = sources[idx];
    q.clear();
    q.push_back(s);
    d[s] = 0;
    std::uint64_t sum = 0, cnt = 0;
    for (std::size_t head = 0; head < q.size(); ++head) {
      const NodeId v = q[head];
      auto visit = [&](NodeId t) {
        if (d[t] < 0) {
          d[t] = d[v] + 1;
          sum += static_cast<std::uint64_t>(d[t]);
          ++cnt;
          q.push_back(t);
        }
      };
      if (mode == PathInterpretation::undirected) {
        for (std::size_t k = proj.offsets[v]; k < proj.offsets[v + 1]; ++k) visit(proj.neighbors[k]);
      } else {
        for (NodeId t : g.successors(v)) visit(t);
      }
    }
    for (NodeId v : q) d[v] = -1;
    dist_sum[idx] = sum;
    reached[idx] = cnt;
  }, chunk);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    total += dist_sum[i];
    out.pairs += reached[i];
  }
  if (out.pairs == 0) throw Error("no reachable pairs for path length");
  out.mean = static_cast<double>(total) / static_cast<double>(out.pairs);
  return out;
}

struct MetricsReport {
  std::size_t node_count = 0;
  std::size_t link_count = 0;
  double density = 0.0;
  std::size_t max_degree = 0;
  std::size_t max_in_degree = 0;
  std::size_t max_out_degree = 0;
  double average_degree = 0.0;
  std::optional<PathLength> path_length_directed;
  std::optional<PathLength> path_length_undirected;
  double clustering_global_undirected = 0.0;
  double clustering_global_directed = 0.0;
  double clustering_average_undirected = 0.0;
  double clustering_average_directed = 0.0;
  std::optional<double> assortativity_undirected;
  std::optional<double> assortativity_out_out;
  std::optional<double> assortativity_out_in;
  std::optional<double> assortativity_in_out;
  std::optional<double> assortativity_in_in;
  std::optional<stats::CorrelationResult> self_degree_spearman;
};

struct SummaryOptions {
  bool path_lengths = true;
  PathLengthOptions paths{};
};

inline MetricsReport summary(const Digraph& g, const SummaryOptions& opt = {}) {
  MetricsReport r;
  const auto n = g.node_count();
  r.node_count = n;
  r.link_count = g.edge_count();
  const double nd = static_cast<double>(n), md = static_cast<double>(r.link_count);
  r.density = n > 1 ? md / (nd * (nd - 1.0)) : 0.0;
  r.average_degree = n > 0 ? 2.0 * md / nd : 0.0;
  for (NodeId v = 0; v < n; ++v) {
    r.max_degree = std::max(r.max_degree, g.degree(v));
    r.max_in_degree = std::max(r.max_in_degree, g.in_degree(v));
    r.max_out_degree = std::max(r.max_out_degree, g.out_degree(v));
  }
  if (opt.path_lengths && r.link_count > 0) {
    r.path_length_directed = average_path_length(g, PathInterpretation::directed_reachable, opt.paths);
    r.path_length_undirected = average_path_length(g, PathInterpretation::undirected, opt.paths);
  }
  const auto cu = clustering_undirected(g);
  const auto cd = clustering_directed(g);
  r.clustering_global_undirected = cu.global;
  r.clustering_average_undirected = cu.average;
  r.clustering_global_directed = cd.global;
  r.clustering_average_directed = cd.average;
  if (r.link_count >= 2) {
    r.assortativity_undirected = assortativity(g, AssortativityMode::undirected);
    r.assortativity_out_out = assortativity(g, AssortativityMode::out_out);
    r.assortativity_out_in = assortativity(g, AssortativityMode::out_in);
    r.assortativity_in_out = assortativity(g, AssortativityMode::in_out);
    r.assortativity_in_in = assortativity(g, AssortativityMode::in_in);
  }
  if (n >= 3) r.self_degree_spearman = self_degree_correlation(g).spearman;
  return r;
}

}  // namespace knet::metrics
