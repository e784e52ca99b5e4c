#include <gtest/gtest.h>

#include "knet/genmodel.hpp"
#include "knet/metrics.hpp"

using namespace knet;
using namespace knet::gen;

namespace {

const Dag& seed_graph() {
  static const Dag g = default_seed_graph();
  return g;
}

GenParams params(double q, std::size_t n, double p, std::uint64_t seed) {
  GenParams prm;
  prm.q = q;
  prm.target_n = n;
  prm.p = p;
  prm.seed = seed;
  return prm;
}

// Share of generated nodes with out-degree >= k.
double survival(const LabeledDag& g, std::size_t k) {
  std::size_t hit = 0, total = 0;
  for (NodeId v = static_cast<NodeId>(g.seed_nodes); v < g.dag.node_count(); ++v, ++total)
    hit += g.dag.out_degree(v) >= k;
  return static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace

TEST(Cosine, HandValues) {
  EXPECT_DOUBLE_EQ(cosine_similarity(FieldVector{0b1011}, FieldVector{0b1011}), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(FieldVector{0b0011}, FieldVector{0b1100}), 0.0);
  EXPECT_NEAR(cosine_similarity(FieldVector{0b11}, FieldVector{0b01}), 0.70711, 1e-5);
  EXPECT_THROW(cosine_similarity(FieldVector{0}, FieldVector{1}), Error);
}

TEST(Generate, RejectsBadParameters) {
  EXPECT_THROW(generate(params(0.0, 50, 0.5, 1), seed_graph()), Error);
  EXPECT_THROW(generate(params(1.5, 500, 0.5, 1), seed_graph()), Error);
  EXPECT_THROW(generate(params(0.0, 500, 0.0, 1), seed_graph()), Error);
}

TEST(Generate, NoSocietalLinksWithoutHumanInfluence) {
  auto g = generate(params(0.0, 3000, 0.3, 2), seed_graph());
  auto s = link_type_stats(g);
  EXPECT_EQ(s.societal, 0u);
  EXPECT_EQ(s.societal_fraction, 0.0);
  EXPECT_TRUE(is_acyclic(g.dag));
  EXPECT_EQ(g.links.size(), g.dag.edge_count());
}

TEST(Generate, SingleLinkPerNodeWhenProcessRunsOnce) {
  auto g = generate(params(0.0, 2000, 1.0, 3), seed_graph());
  for (NodeId v = static_cast<NodeId>(g.seed_nodes); v < g.dag.node_count(); ++v) ASSERT_EQ(g.dag.out_degree(v), 1u);
  EXPECT_EQ(g.dag.edge_count(), seed_graph().edge_count() + 2000 - seed_graph().node_count());
}

TEST(Generate, LinksPointToOlderNodesAndCarryBirth) {
  auto g = generate(params(0.1, 1500, 0.4, 4), seed_graph());
  const auto edges = g.dag.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    ASSERT_LT(edges[k].target, edges[k].source);
    if (edges[k].source < g.seed_nodes) {
      ASSERT_EQ(g.links[k].birth, 0);
      ASSERT_EQ(g.links[k].type, LinkType::logical);
    } else {
      ASSERT_EQ(g.links[k].birth, static_cast<std::int64_t>(edges[k].source - g.seed_nodes + 1));
    }
  }
}

TEST(Generate, SameSeedSameGraph) {
  auto a = generate(params(0.05, 2000, 0.4, 5), seed_graph());
  auto b = generate(params(0.05, 2000, 0.4, 5), seed_graph());
  EXPECT_EQ(a.dag.edges(), b.dag.edges());
  for (std::size_t k = 0; k < a.links.size(); ++k) ASSERT_EQ(a.links[k].type, b.links[k].type);
}

TEST(Generate, LinkCountGrowsWithHumanInfluence) {
  double prev = 0.0;
  for (double q : {0.0, 0.05, 0.1}) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
      total += static_cast<double>(generate(params(q, 3000, 0.4, seed), seed_graph()).dag.edge_count());
    EXPECT_GE(total / 10.0, prev) << "q = " << q;
    prev = total / 10.0;
  }
}

TEST(Generate, LogicalOutDegreeMatchesStopProbability) {
  // Dense vectors with w = 0 put every node in the world and a large a makes
  // draws nearly uniform, so repeat draws are rare.
  auto prm = params(0.0, 20000, 0.25, 6);
  prm.vector_density = 0.9;
  prm.a = 1000.0;
  auto g = generate(prm, seed_graph());
  auto s = link_type_stats(g);
  double generated = 0, links = 0;
  for (std::size_t k = 0; k < s.logical_out_histogram.size(); ++k) {
    generated += double(s.logical_out_histogram[k]);
    links += double(k * s.logical_out_histogram[k]);
  }
  EXPECT_NEAR(links / generated, 1.0 / prm.p, 0.03 * (1.0 / prm.p));
}

TEST(Generate, TailContrastBetweenRegimes) {
  auto theorem = generate(params(0.0, 20000, 0.25, 7), seed_graph());
  auto citation = generate(params(0.125, 20000, 0.25, 7), seed_graph());
  // Geometric tail: each further step of 1/p multiplies survival by about e^-1.
  const double k0 = 3.0 / 0.25;
  const double s1 = survival(theorem, std::size_t(k0)), s2 = survival(theorem, std::size_t(2 * k0));
  ASSERT_GT(s1, 0.0);
  EXPECT_LT(s2 / s1, std::exp(-2.0));
  EXPECT_GE(survival(citation, 50), 10.0 * std::max(survival(theorem, 50), 1.0 / 20000.0));
}

TEST(Calibrate, ClosedFormTarget) {
  GenParams fixed = params(0.0, 1000, 1.0, 8);
  const double m = static_cast<double>(seed_graph().edge_count() + 1000 - seed_graph().node_count());
  CalibrationSpace space;
  auto r = calibrate(fixed, seed_graph(), m, space);
  EXPECT_EQ(r.params.p, 1.0);
  EXPECT_EQ(r.achieved_mean_m, m);
  EXPECT_EQ(r.evaluations, 1u);
}

TEST(Calibrate, HitsReachableTarget) {
  GenParams fixed = params(0.0, 3000, 0.5, 9);
  CalibrationSpace space;
  space.tolerance = 0.05;
  auto r = calibrate(fixed, seed_graph(), 12000.0, space);
  EXPECT_LT(r.relative_error, 0.05);
  EXPECT_NEAR(r.params.p, 0.25, 0.05);
}

TEST(Calibrate, InfeasibleTargetReportsBounds) {
  GenParams fixed = params(0.0, 1000, 0.5, 10);
  CalibrationSpace space;
  space.bisection_steps = 2;
  try {
    calibrate(fixed, seed_graph(), 1e10, space);
    FAIL();
  } catch (const CalibrationError& e) {
    EXPECT_LT(e.achieved_max(), 1e10);
    EXPECT_GT(e.achieved_max(), e.achieved_min());
  }
}
