#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

#include "knet/clean.hpp"
#include "knet/io.hpp"
#include "test_util.hpp"

using namespace knet;

TEST(EdgeList, CommentsAndReindexing) {
  std::istringstream in("# c\n1 2\n2 3");
  auto r = load_edge_list(in);
  EXPECT_EQ(r.graph.node_count(), 3u);
  EXPECT_EQ(r.graph.edge_count(), 2u);
  EXPECT_EQ(r.graph.attributes().external_ids, (std::vector<std::int64_t>{1, 2, 3}));
}

TEST(EdgeList, DuplicateLineCounted) {
  std::istringstream in("10\t20\n10\t20\n");
  auto r = load_edge_list(in);
  EXPECT_EQ(r.graph.edge_count(), 1u);
  EXPECT_EQ(r.duplicates_dropped, 1u);
}

TEST(EdgeList, NonIntegerTokenReportsLine) {
  std::istringstream in("1 2\n# ok\n3 x\n");
  try {
    load_edge_list(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(EdgeList, SerializedEdgeListRoundTrips) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = fixtures::random_dag(rng, 40, 0.1);
    std::stringstream buf;
    write_edge_list(buf, g);
    auto back = load_edge_list(buf).graph;
    std::set<std::pair<std::int64_t, std::int64_t>> a, b;
    for (const Edge& e : g.edges()) a.emplace(e.source, e.target);
    for (const Edge& e : back.edges()) b.emplace(external_id(back, e.source), external_id(back, e.target));
    ASSERT_EQ(a, b);
  }
}

TEST(Metadata, LabelWithoutDate) {
  std::istringstream edges("7 8\n");
  auto g = load_edge_list(edges).graph;
  std::istringstream meta("id,label,date\n7,CMVTH,\n");
  auto r = load_csv_metadata(meta, g);
  EXPECT_EQ(r.graph.attributes().labels[0], "CMVTH");
  EXPECT_FALSE(r.graph.attributes().dates[0].has_value());
}

TEST(Metadata, DateAttachedAndUnknownIdsListed) {
  std::istringstream edges("7 8\n");
  auto g = load_edge_list(edges).graph;
  std::istringstream meta("id,label,date\n7,,1997-04-01\n99,\"quoted, label\",2001\n");
  auto r = load_csv_metadata(meta, g);
  ASSERT_TRUE(r.graph.attributes().dates[0].has_value());
  EXPECT_EQ(r.graph.attributes().dates[0]->str(), "1997-04-01");
  EXPECT_EQ(r.unknown_ids, (std::vector<std::string>{"99"}));
}

TEST(Metadata, MalformedRowReportsLine) {
  auto g = build(2, {{0, 1}}).graph;
  std::istringstream meta("id,label,date\n0,a,2000\n1,b\n");
  try {
    load_csv_metadata(meta, g);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream bad_date("id,label,date\n0,a,20x0\n");
  EXPECT_THROW(load_csv_metadata(bad_date, g), ParseError);
}

TEST(Dates, MixedPrecisionComparesYears) {
  EXPECT_TRUE(strictly_later(*parse_date("2001-01-01"), *parse_date("2000-12-31")));
  EXPECT_FALSE(strictly_later(*parse_date("2000-12-31"), *parse_date("2000")));
  EXPECT_FALSE(strictly_later(*parse_date("2000"), *parse_date("2000-01-01")));
  EXPECT_TRUE(strictly_later(*parse_date("2001"), *parse_date("2000-06-01")));
  EXPECT_FALSE(parse_date("2000-13-01").has_value());
  EXPECT_FALSE(parse_date("20").has_value());
}

TEST(NetworkFiles, RoundTripKeepsIsolatesAndMetadata) {
  NodeAttributes attrs;
  attrs.labels = {"a", "b, with comma", "c"};
  attrs.dates = {Date{1999, 5, 2}, std::nullopt, Date{2001}};
  attrs.fields = {FieldVector{1}, FieldVector{6}, std::nullopt};
  auto g = build(3, {{0, 1}}, attrs).graph;
  auto dir = std::filesystem::temp_directory_path() / "knet_io_roundtrip";
  std::filesystem::remove_all(dir);
  save_network(dir, g);
  auto back = load_network(dir).graph;
  EXPECT_EQ(back, g);
  EXPECT_EQ(back.attributes().labels, attrs.labels);
  EXPECT_EQ(back.attributes().dates[0]->str(), "1999-05-02");
  EXPECT_FALSE(back.attributes().dates[1].has_value());
  EXPECT_EQ(back.attributes().fields[1], FieldVector{6});
  std::filesystem::remove_all(dir);
}

TEST(NetworkFiles, LinkAnnotationsRoundTrip) {
  auto g = build(3, {{1, 0}, {2, 0}, {2, 1}}).graph;
  std::vector<LinkInfo> links{{LinkType::logical, 0}, {LinkType::societal, 4}, {LinkType::logical, 4}};
  auto dir = std::filesystem::temp_directory_path() / "knet_io_links";
  std::filesystem::remove_all(dir);
  save_network(dir, g, &links);
  auto back = load_network(dir);
  ASSERT_EQ(back.links.size(), 3u);
  EXPECT_EQ(back.links[1].type, LinkType::societal);
  EXPECT_EQ(back.links[1].birth, 4);
  std::filesystem::remove_all(dir);
}

TEST(Clean, AlreadyCleanDagIsUnchanged) {
  std::mt19937_64 rng(4);
  Dag g;
  do g = fixtures::random_dag(rng, 30, 0.3);
  while (largest_component_nodes(g).size() != g.node_count() ||
         non_isolated_nodes(g).size() != g.node_count());
  auto r = clean(g);
  EXPECT_EQ(r.dag, g);
  EXPECT_EQ(r.report.isolates_removed, 0u);
  EXPECT_EQ(r.report.date_violations_removed, 0u);
  EXPECT_EQ(r.report.back_edges_removed, 0u);
  EXPECT_EQ(r.report.post_cycle_nodes_dropped, 0u);
}

TEST(Clean, PipelineOrder) {
  // 0..3 form a cycle with a tail, 4-5 a separate pair, 6 isolated.
  auto g = build(7, {{0, 1}, {1, 2}, {2, 0}, {3, 0}, {4, 5}}).graph;
  auto r = clean(g);
  EXPECT_EQ(r.report.isolates_removed, 1u);
  EXPECT_EQ(r.report.component_nodes_kept, 4u);
  EXPECT_EQ(r.report.back_edges_removed, 1u);
  EXPECT_EQ(r.dag.node_count(), 4u);
  EXPECT_EQ(r.dag.edge_count(), 3u);
  EXPECT_EQ(r.original, (std::vector<NodeId>{0, 1, 2, 3}));
  EXPECT_EQ(r.removed_edges, (std::vector<Edge>{{2, 0}}));
}

TEST(Clean, ResultIsConnectedAndAcyclic) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    auto g = fixtures::random_digraph(rng, 25, 0.06);
    if (g.edge_count() == 0) continue;
    auto r = clean(g);
    ASSERT_TRUE(is_acyclic(r.dag));
    ASSERT_EQ(largest_component_nodes(r.dag).size(), r.dag.node_count());
  }
}

TEST(Clean, EmptyResultIsAnError) { EXPECT_THROW(clean(build(3, {}).graph), Error); }
