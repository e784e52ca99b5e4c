#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "knet/disruption.hpp"
#include "test_util.hpp"

using namespace knet;
using namespace knet::disruption;

namespace {

// Set-based evaluation straight from the edge list.
struct Oracle {
  std::size_t n;
  std::vector<Edge> edges;
  std::vector<long> gen;

  explicit Oracle(const Digraph& g) : n(g.node_count()), edges(g.edges()), gen(n, -1) {
    for (NodeId v = 0; v < n; ++v) generation(v);
  }

  long generation(NodeId v) {
    if (gen[v] >= 0) return gen[v];
    long g = 0;
    for (const Edge& e : edges)
      if (e.source == v) g = std::max(g, generation(e.target) + 1);
    return gen[v] = g;
  }

  std::set<NodeId> citers(NodeId v) const {
    std::set<NodeId> s;
    for (const Edge& e : edges)
      if (e.target == v) s.insert(e.source);
    return s;
  }

  std::optional<double> value(NodeId i, std::optional<long> window) const {
    const long gi = gen[i];
    auto limit = [&](NodeId x) { return !window || gen[x] < gi + *window + 1; };
    std::set<NodeId> p, pt;
    for (NodeId x : citers(i))
      if (limit(x)) p.insert(x);
    for (const Edge& e : edges)
      if (e.source == i)
        for (NodeId x : citers(e.target))
          if (gen[x] > gi && limit(x)) pt.insert(x);
    std::set<NodeId> uni = p, both;
    uni.insert(pt.begin(), pt.end());
    std::set_intersection(p.begin(), p.end(), pt.begin(), pt.end(), std::inserter(both, both.end()));
    if (uni.empty()) return std::nullopt;
    return (double(p.size() - both.size()) - double(both.size())) / double(uni.size());
  }
};

}  // namespace

TEST(Disruption, FullyDisruptiveNode) {
  // 2 cites 1, 1 cites 0; nobody else cites 0.
  auto g = build(3, {{1, 0}, {2, 1}}).graph;
  auto r = disruption_full(g, topological_generations(g));
  EXPECT_DOUBLE_EQ(*r[1].disruption, 1.0);
  EXPECT_EQ(r[1].citations, 1u);
  EXPECT_FALSE(r[2].disruption.has_value());
}

TEST(Disruption, FullyDevelopmentalNode) {
  // 2 cites both 1 and its reference 0.
  auto g = build(3, {{1, 0}, {2, 1}, {2, 0}}).graph;
  auto r = disruption_full(g, topological_generations(g));
  EXPECT_DOUBLE_EQ(*r[1].disruption, -1.0);
}

TEST(Disruption, MatchesSetOracle) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng() % 12;
    auto g = fixtures::random_dag(rng, n, 0.15 + 0.5 * double(rng() % 100) / 100.0);
    Oracle o(g);
    const auto gen = topological_generations(g);
    const auto full = disruption_full(g, gen);
    const auto win = disruption_windowed(g, gen, 2);
    for (NodeId i = 0; i < n; ++i) {
      ASSERT_EQ(gen[i], o.gen[i]);
      const auto a = o.value(i, std::nullopt), b = o.value(i, 2);
      ASSERT_EQ(full[i].disruption.has_value(), a.has_value()) << "rep " << rep << " node " << i;
      if (a) ASSERT_NEAR(*full[i].disruption, *a, 1e-12);
      ASSERT_EQ(win[i].disruption.has_value(), b.has_value());
      if (b) ASSERT_NEAR(*win[i].disruption, *b, 1e-12);
    }
  }
}

TEST(Disruption, LargeWindowEqualsFull) {
  std::mt19937_64 rng(32);
  auto g = fixtures::random_dag(rng, 80, 0.08);
  const auto gen = topological_generations(g);
  const auto full = disruption_full(g, gen);
  const auto win = disruption_windowed(g, gen, static_cast<int>(gen.generation_count));
  for (NodeId i = 0; i < g.node_count(); ++i) EXPECT_EQ(full[i].disruption, win[i].disruption);
}

TEST(Disruption, DatesIsomorphicToGenerationsGiveFullValues) {
  std::mt19937_64 rng(33);
  auto g = fixtures::random_dag(rng, 60, 0.1);
  const auto gen = topological_generations(g);
  NodeAttributes attrs;
  attrs.dates.resize(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) attrs.dates[v] = Date{1900 + static_cast<int>(gen[v])};
  auto dated = g.with_attributes(attrs);
  const auto full = disruption_full(g, gen);
  const auto by_date = disruption_by_date(dated);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    EXPECT_EQ(full[i].disruption, by_date[i].disruption);
    EXPECT_EQ(by_date[i].mode, Mode::date);
  }
}

TEST(Disruption, DateModeNeedsDates) {
  auto g = build(2, {{1, 0}}).graph;
  EXPECT_THROW(disruption_by_date(g), Error);
}

TEST(Disruption, ReferenceMetrics) {
  auto g = build(4, {{1, 0}, {2, 0}, {3, 0}, {3, 1}}).graph;
  auto prefs = reference_metrics(g, topological_generations(g));
  ASSERT_EQ(prefs.size(), 3u);
  const auto& p3 = prefs[2];
  EXPECT_EQ(p3.node, 3u);
  EXPECT_DOUBLE_EQ(p3.reference_popularity, (3.0 + 1.0) / 2.0);
  EXPECT_DOUBLE_EQ(p3.reference_age, (2.0 + 1.0) / 2.0);
}

TEST(Gini, KnownValues) {
  std::vector<Record> two{{0, -1.0, 1, Mode::full}, {1, 1.0, 1, Mode::full}};
  EXPECT_DOUBLE_EQ(*gini(two), 0.5);
  std::vector<Record> equal{{0, 0.3, 1, Mode::full}, {1, 0.3, 1, Mode::full}, {2, std::nullopt, 0, Mode::full}};
  EXPECT_DOUBLE_EQ(*gini(equal), 0.0);
  std::vector<Record> zeros{{0, -1.0, 1, Mode::full}, {1, -1.0, 1, Mode::full}};
  EXPECT_FALSE(gini(zeros).has_value());
  EXPECT_THROW(gini({{0, 0.1, 1, Mode::full}}), Error);
}

TEST(Gini, MatchesPairwiseDefinition) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Record> rs;
    std::vector<double> x;
    for (NodeId i = 0; i < 30; ++i) {
      const double d = u(rng);
      rs.push_back({i, d, 1, Mode::full});
      x.push_back((d + 1.0) / 2.0);
    }
    double abs_sum = 0, total = 0;
    for (double a : x) {
      total += a;
      for (double b : x) abs_sum += std::abs(a - b);
    }
    const double want = abs_sum / (2.0 * 30.0 * total);
    EXPECT_NEAR(*gini(rs), want, 1e-12);
  }
}

TEST(Groups, EvolutionBoundaries) {
  // A chain with 291 generations: 271 remain after trimming, width 27.1.
  const std::size_t n = 291;
  GraphBuilder b(n);
  for (NodeId v = 1; v < n; ++v) b.add_edge(v, v - 1);
  auto g = std::move(b).build().graph;
  const auto gen = topological_generations(g);
  ASSERT_EQ(gen.generation_count, 291);
  const auto groups = grouped_evolution(gen, disruption_full(g, gen));
  ASSERT_EQ(groups.size(), 10u);
  EXPECT_DOUBLE_EQ(groups[0].left, 10.0);
  EXPECT_NEAR(groups[0].right, 37.1, 1e-9);
  EXPECT_NEAR(groups[9].right, 281.0, 1e-9);
  std::size_t total = 0;
  for (const auto& s : groups) total += s.nodes;
  EXPECT_EQ(total, 271u);
  // Generation 37 belongs to [10, 37.1), 38 to the next group.
  EXPECT_EQ(groups[0].nodes, 28u);
  EXPECT_EQ(groups[1].nodes, 27u);
}

TEST(Groups, PreferenceEqualCounts) {
  std::vector<PreferenceRecord> prefs;
  std::vector<Record> recs;
  for (NodeId i = 0; i < 10; ++i) {
    prefs.push_back({i, double(10 - i), double(i)});
    recs.push_back({i, 0.1 * i, i, Mode::full});
  }
  auto groups = grouped_by_preference(prefs, recs, PreferenceKey::popularity);
  ASSERT_EQ(groups.size(), 5u);
  for (const auto& s : groups) EXPECT_EQ(s.nodes, 2u);
  EXPECT_DOUBLE_EQ(groups[0].left, 1.0);
  EXPECT_DOUBLE_EQ(groups[0].right, 2.0);
  EXPECT_NEAR(*groups[0].mean_disruption, 0.85, 1e-12);
}

TEST(Groups, ConstantKeyStillSplits) {
  std::vector<PreferenceRecord> prefs;
  std::vector<Record> recs;
  for (NodeId i = 0; i < 10; ++i) {
    prefs.push_back({i, 1.0, 1.0});
    recs.push_back({i, 0.0, 1, Mode::full});
  }
  auto groups = grouped_by_preference(prefs, recs, PreferenceKey::age);
  for (const auto& s : groups) EXPECT_EQ(s.nodes, 2u);
}
