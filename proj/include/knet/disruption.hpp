#pragma once

// Disruption (CD index) with topological generations standing in for time,
// plus the citation-preference metrics and grouped analyses built on it.
//
// For a focal node i with citers P(i) and references S(i):
//   P~(i) = citers of any reference of i that are later than i
//   D(i)  = (|P \ P~| - |P n P~|) / |P u P~|,   citations(i) = |P|
// "Later" is g > g(i) (generations) or a strictly later date. The windowed
// variant restricts both sets to g < g(i) + window + 1.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

#include "knet/graph.hpp"
#include "knet/parallel.hpp"
#include "knet/stats.hpp"
#include "knet/topo.hpp"

namespace knet::disruption {

enum class Mode { full, windowed, date };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::full: return "full";
    case Mode::windowed: return "windowed";
    case Mode::date: return "date";
  }
  return "full";
}

struct Record {
  NodeId node = 0;
  std::optional<double> disruption;  // absent when |P u P~| = 0
  std::size_t citations = 0;
  Mode mode = Mode::full;
};

namespace detail {

// in_scope(i, x): citer x of i counts towards P(i).
// later(i, x): citer x of a reference of i counts towards P~(i).
template <class InScope, class Later>
std::vector<Record> compute(const Digraph& g, Mode mode, InScope in_scope, Later later) {
  const auto n = g.node_count();
  std::vector<Record> out(n);
  constexpr std::size_t chunk = 256;
  const unsigned workers = worker_count(n, default_threads(), chunk);
  std::vector<std::vector<NodeId>> stamps(workers, std::vector<NodeId>(n, 0));
  parallel_for_workers(n, workers, [&](std::size_t idx, unsigned w) {
    auto& stamp = stamps[w];
    const auto i = static_cast<NodeId>(idx);
    const NodeId mark = i + 1;
    std::size_t tilde = 0;
    for (NodeId j : g.successors(i))
      for (NodeId x : g.predecessors(j))
        if (stamp[x] != mark && later(i, x)) {
          stamp[x] = mark;
          ++tilde;
        }
    std::size_t only = 0, both = 0;
    for (NodeId x : g.predecessors(i)) {
      if (!in_scope(i, x)) continue;
      if (stamp[x] == mark)
        ++both;
      else
        ++only;
    }
    Record& r = out[i];
    r.node = i;
    r.mode = mode;
    r.citations = only + both;
    const std::size_t uni = tilde + only;
    if (uni > 0) r.disruption = (static_cast<double>(only) - static_cast<double>(both)) / static_cast<double>(uni);
  }, chunk);
  return out;
}

}  // namespace detail

inline void check_generations(const Digraph& g, const GenerationAssignment& gen) {
  if (gen.size() != g.node_count()) throw Error("generation assignment does not match graph");
}

inline std::vector<Record> disruption_full(const Digraph& g, const GenerationAssignment& gen) {
  check_generations(g, gen);
  return detail::compute(
      g, Mode::full, [](NodeId, NodeId) { return true; },
      [&](NodeId i, NodeId x) { return gen[x] > gen[i]; });
}

inline std::vector<Record> disruption_windowed(const Digraph& g, const GenerationAssignment& gen, int window = 10) {
  check_generations(g, gen);
  return detail::compute(
      g, Mode::windowed, [&](NodeId i, NodeId x) { return gen[x] < gen[i] + window + 1; },
      [&](NodeId i, NodeId x) { return gen[x] > gen[i] && gen[x] < gen[i] + window + 1; });
}

// Same definition with dates in place of generations. With a window, both
// sets are limited to nodes dated at most `window_years` years after i.
inline std::vector<Record> disruption_by_date(const Digraph& g, std::optional<int> window_years = std::nullopt) {
  const auto& dates = g.attributes().dates;
  std::vector<NodeId> missing;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (dates.empty() || !dates[v]) missing.push_back(v);
  if (!missing.empty()) {
    std::string msg = "date-based disruption needs a date on every node; missing for " +
                      std::to_string(missing.size()) + " node(s):";
    for (std::size_t k = 0; k < std::min<std::size_t>(missing.size(), 10); ++k) msg += " " + std::to_string(missing[k]);
    if (missing.size() > 10) msg += " ...";
    throw Error(msg);
  }
  auto within = [&](NodeId i, NodeId x) { return !window_years || dates[x]->year - dates[i]->year <= *window_years; };
  return detail::compute(
      g, Mode::date, within, [&](NodeId i, NodeId x) { return strictly_later(*dates[x], *dates[i]) && within(i, x); });
}

struct DefinedPairs {
  std::vector<double> disruption;
  std::vector<double> citations;
  std::vector<NodeId> nodes;
};

// Records with a defined disruption value, as parallel arrays.
inline DefinedPairs defined(const std::vector<Record>& records) {
  DefinedPairs out;
  for (const auto& r : records)
    if (r.disruption) {
      out.disruption.push_back(*r.disruption);
      out.citations.push_back(static_cast<double>(r.citations));
      out.nodes.push_back(r.node);
    }
  return out;
}

inline std::optional<double> mean_disruption(const std::vector<Record>& records) {
  auto d = defined(records);
  if (d.disruption.empty()) return std::nullopt;
  return stats::mean(d.disruption);
}

// Pearson correlation between disruption and citations over defined records.
inline stats::CorrelationResult citation_correlation(const std::vector<Record>& records) {
  auto d = defined(records);
  return stats::correlate(d.disruption, d.citations, stats::CorrelationKind::pearson);
}

struct PreferenceRecord {
  NodeId node = 0;
  double reference_popularity = 0.0;  // mean citer count of the references
  double reference_age = 0.0;         // mean generation gap to the references
};

// One record per node with at least one reference.
inline std::vector<PreferenceRecord> reference_metrics(const Digraph& g, const GenerationAssignment& gen) {
  check_generations(g, gen);
  std::vector<PreferenceRecord> out;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    auto refs = g.successors(i);
    if (refs.empty()) continue;
    double pop = 0.0, age = 0.0;
    for (NodeId j : refs) {
      pop += static_cast<double>(g.in_degree(j));
      age += static_cast<double>(gen[i] - gen[j]);
    }
    const double k = static_cast<double>(refs.size());
    out.push_back({i, pop / k, age / k});
  }
  return out;
}

// Gini coefficient of disruption after the map d -> (d + 1) / 2:
//   G = sum_ij |x_i - x_j| / (2 n^2 mean)
inline std::optional<double> gini(const std::vector<Record>& records) {
  std::vector<double> x;
  for (const auto& r : records)
    if (r.disruption) x.push_back((*r.disruption + 1.0) / 2.0);
  if (x.size() < 2) throw Error("gini needs at least two defined disruption values");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double total = 0.0, weighted = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    total += x[k];
    weighted += (2.0 * static_cast<double>(k + 1) - n - 1.0) * x[k];
  }
  if (total == 0.0) return std::nullopt;
  // sum_ij |x_i - x_j| = 2 * weighted; mean = total / n
  return 2.0 * weighted / (2.0 * n * total);
}

struct GroupStat {
  double left = 0.0;
  double right = 0.0;
  std::size_t nodes = 0;           // all nodes assigned to the group
  std::size_t defined = 0;         // of which with defined disruption
  std::optional<double> mean_disruption;
  std::optional<double> correlation;  // disruption-citations Pearson
};

namespace detail {

inline GroupStat group_stats(double left, double right, std::size_t nodes, const std::vector<double>& d,
                             const std::vector<double>& c) {
  GroupStat s{left, right, nodes, d.size(), std::nullopt, std::nullopt};
  if (!d.empty()) s.mean_disruption = stats::mean(d);
  if (d.size() >= 3) s.correlation = stats::correlate(d, c, stats::CorrelationKind::pearson).coefficient;
  return s;
}

}  // namespace detail

// Drops the first and last `trim` generations and splits the remaining
// generation range into `groups` equal-width, left-closed intervals.
inline std::vector<GroupStat> grouped_evolution(const GenerationAssignment& gen, const std::vector<Record>& records,
                                                int groups = 10, int trim = 10) {
  if (gen.generation_count <= 2 * trim) throw Error("too few generations for grouped evolution");
  if (groups <= 0) throw Error("group count must be positive");
  if (records.size() != gen.size()) throw Error("records do not match generation assignment");
  const long span = gen.generation_count - 2 * trim;
  const double width = static_cast<double>(span) / groups;
  std::vector<std::vector<double>> d(static_cast<std::size_t>(groups)), c(static_cast<std::size_t>(groups));
  std::vector<std::size_t> counts(static_cast<std::size_t>(groups), 0);
  for (const auto& r : records) {
    const long g = gen[r.node];
    if (g < trim || g >= gen.generation_count - trim) continue;
    // floor((g - trim) / width) in exact integer arithmetic
    const auto k = static_cast<std::size_t>((g - trim) * groups / span);
    ++counts[k];
    if (r.disruption) {
      d[k].push_back(*r.disruption);
      c[k].push_back(static_cast<double>(r.citations));
    }
  }
  std::vector<GroupStat> out;
  for (int k = 0; k < groups; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    out.push_back(detail::group_stats(trim + k * width, trim + (k + 1) * width, counts[ks], d[ks], c[ks]));
  }
  return out;
}

enum class PreferenceKey { popularity, age };

inline std::string_view to_string(PreferenceKey k) { return k == PreferenceKey::popularity ? "popularity" : "age"; }

// Joins preference and disruption records (defined disruption only), sorts by
// the key (node id breaks ties) and cuts into `groups` equal-count groups.
// The returned bounds are the key range of each group.
inline std::vector<GroupStat> grouped_by_preference(const std::vector<PreferenceRecord>& prefs,
                                                    const std::vector<Record>& records, PreferenceKey key,
                                                    int groups = 5) {
  if (groups <= 0) throw Error("group count must be positive");
  struct Row {
    NodeId node;
    double key, d, c;
  };
  std::vector<const Record*> by_node;
  for (const auto& r : records) {
    if (r.node >= by_node.size()) by_node.resize(r.node + 1, nullptr);
    by_node[r.node] = &r;
  }
  std::vector<Row> rows;
  for (const auto& p : prefs) {
    if (p.node >= by_node.size() || !by_node[p.node] || !by_node[p.node]->disruption) continue;
    const Record& r = *by_node[p.node];
    rows.push_back({p.node, key == PreferenceKey::popularity ? p.reference_popularity : p.reference_age,
                    *r.disruption, static_cast<double>(r.citations)});
  }
  if (rows.size() < static_cast<std::size_t>(groups)) throw Error("fewer records than groups");
  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return a.key != b.key ? a.key < b.key : a.node < b.node; });
  std::vector<GroupStat> out;
  const std::size_t n = rows.size();
  for (std::size_t k = 0; k < static_cast<std::size_t>(groups); ++k) {
    const std::size_t lo = k * n / static_cast<std::size_t>(groups);
    const std::size_t hi = (k + 1) * n / static_cast<std::size_t>(groups);
    std::vector<double> d, c;
    for (std::size_t i = lo; i < hi; ++i) {
      d.push_back(rows[i].d);
      c.push_back(rows[i].c);
    }
    out.push_back(detail::group_stats(rows[lo].key, rows[hi - 1].key, hi - lo, d, c));
  }
  return out;
}

}  // namespace knet::disruption
