#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = KNET_FIXTURE_DIR;

int run(const std::string& args) {
  const std::string cmd = std::string(KNET_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / (std::string("knet_cli_") + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string at(const std::string& name) const { return (dir / name).string(); }

  // Small simulated network shared by the analysis tests.
  std::string simulated() {
    const auto out = at("sim");
    if (!fs::exists(out)) {
      EXPECT_EQ(run("simulate --n 400 --p 0.5 --q 0.1 --seed 3 --out " + out), 0);
    }
    return out;
  }

  fs::path dir;
};

TEST_F(Cli, HelpAndUsage) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("ingest --format xml --input x --out " + at("o")), 2);
}

TEST_F(Cli, IngestMetamath) {
  ASSERT_EQ(run("ingest --format metamath --input " + (kFixtures / "demo0.mm").string() + " --clean --out " + at("mm")), 0);
  for (const char* f : {"nodes.csv", "edges.txt", "cleaning.json", "manifest.json"}) EXPECT_TRUE(fs::exists(dir / "mm" / f)) << f;
  const auto c = load_json(dir / "mm" / "cleaning.json");
  EXPECT_EQ(c["statements"]["theorems"], 1);
  EXPECT_EQ(c["statements"]["axioms"], 3);
  const auto m = load_json(dir / "mm" / "manifest.json");
  EXPECT_EQ(m["command"], "ingest");
  EXPECT_EQ(m["inputs"].size(), 1u);
  EXPECT_EQ(m["config_hash"].get<std::string>().size(), 64u);
}

TEST_F(Cli, IngestEdgeListWithMetadata) {
  std::ofstream(dir / "e.txt") << "# toy\n1 2\n2 3\n1 3\n3 4\n1 2\n";
  std::ofstream(dir / "m.csv") << "id,label,date\n1,a,2001-01-01\n2,b,2000-01-01\n3,c,1999\n4,d,1998-05\n";
  ASSERT_EQ(run("ingest --format edgelist --input " + at("e.txt") + " --metadata " + at("m.csv") + " --clean --out " +
                at("net")),
            0);
  const auto c = load_json(dir / "net" / "cleaning.json");
  EXPECT_EQ(c["duplicates_dropped"], 1);
  EXPECT_EQ(c["nodes"], 4);
  EXPECT_EQ(c["links"], 4);
  ASSERT_EQ(run("analyze --network " + at("net") + " --disruption date --out " + at("an")), 0);
  EXPECT_TRUE(fs::exists(dir / "an" / "qq_date_generation.csv"));
}

TEST_F(Cli, ParseErrorIsInputError) {
  std::ofstream(dir / "e.txt") << "1 2\n2 x\n";
  EXPECT_EQ(run("ingest --format edgelist --input " + at("e.txt") + " --out " + at("o")), 2);
  EXPECT_FALSE(fs::exists(dir / "o"));
}

TEST_F(Cli, MissingInputLeavesNoOutputs) {
  EXPECT_EQ(run("ingest --format edgelist --input " + at("absent.txt") + " --out " + at("o")), 2);
  EXPECT_FALSE(fs::exists(dir / "o"));
  fs::create_directories(dir / "empty");
  EXPECT_EQ(run("analyze --network " + at("empty") + " --metrics --out " + at("o")), 2);
  EXPECT_FALSE(fs::exists(dir / "o"));
}

TEST_F(Cli, DateModeWithoutDatesFails) {
  const auto sim = simulated();
  EXPECT_NE(run("analyze --network " + sim + " --disruption date --out " + at("o")), 0);
  EXPECT_FALSE(fs::exists(dir / "o"));
}

TEST_F(Cli, InfeasibleCalibrationIsComputationError) {
  EXPECT_EQ(run("simulate --n 300 --calibrate --target-m 1e9 --bisection-steps 2 --realizations 1 --out " + at("o")), 1);
  EXPECT_FALSE(fs::exists(dir / "o"));
}

TEST_F(Cli, AnalyzeOutputs) {
  const auto sim = simulated();
  ASSERT_EQ(run("analyze --network " + sim +
                " --metrics --disruption windowed --window 10 --gini --self-degree --groups evolution --groups popularity"
                " --groups age --bootstrap 100 --seed 4 --out " + at("an")),
            0);
  for (const char* f : {"metrics.json", "disruption.csv", "ccdf_total.csv", "ccdf_in.csv", "ccdf_out.csv",
                        "self_degree.csv", "groups_evolution.csv", "groups_popularity.csv", "groups_age.csv",
                        "preference.csv", "bootstrap_indegree_top.csv", "bootstrap_disruption_bottom.csv"})
    EXPECT_TRUE(fs::exists(dir / "an" / f)) << f;
  const auto j = load_json(dir / "an" / "metrics.json");
  EXPECT_EQ(j["metrics"]["node_count"], 400);
  EXPECT_EQ(j["disruption"]["window"], 10);
  EXPECT_TRUE(j["disruption"]["gini"].is_number());
  EXPECT_EQ(j["source"], "simulate");
}

TEST_F(Cli, SixSignificantDigits) {
  const auto sim = simulated();
  ASSERT_EQ(run("analyze --network " + sim + " --metrics --no-paths --out " + at("an")), 0);
  const double d = load_json(dir / "an" / "metrics.json")["metrics"]["density"];
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", d);
  EXPECT_EQ(std::strtod(buf, nullptr), d);
}

TEST_F(Cli, RerunsAreByteIdentical) {
  const auto sim = simulated();
  for (const char* o : {"a", "b"})
    ASSERT_EQ(run("null --network " + sim + " --ensemble 3 --seed 11 --metric clustering --metric disruption-corr --out " +
                  at(o)),
              0);
  for (const char* f : {"null_clustering.csv", "null_disruption-corr.csv", "zscores.json"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  auto ma = load_json(dir / "a" / "manifest.json"), mb = load_json(dir / "b" / "manifest.json");
  ma.erase("argv");
  mb.erase("argv");
  EXPECT_EQ(ma, mb);
  EXPECT_EQ(run("simulate --n 300 --seed 2 --q 0.2 --out " + at("s1")), 0);
  EXPECT_EQ(run("simulate --n 300 --seed 2 --q 0.2 --out " + at("s2")), 0);
  EXPECT_EQ(slurp(dir / "s1" / "edges.txt"), slurp(dir / "s2" / "edges.txt"));
}

TEST_F(Cli, ThreadCountDoesNotChangeOutputs) {
  const auto sim = simulated();
  for (const char* t : {"1", "3"}) {
    ASSERT_EQ(run(std::string("--threads ") + t + " analyze --network " + sim +
                  " --metrics --disruption windowed --self-degree --bootstrap 200 --seed 8 --out " + at(std::string("an") + t)),
              0);
    ASSERT_EQ(run(std::string("--threads ") + t + " null --network " + sim + " --ensemble 3 --seed 8 --metric mean-disruption --out " +
                  at(std::string("nl") + t)),
              0);
  }
  for (const char* f : {"metrics.json", "disruption.csv", "self_degree.csv", "bootstrap_indegree_top.csv"})
    EXPECT_EQ(slurp(dir / "an1" / f), slurp(dir / "an3" / f)) << f;
  EXPECT_EQ(slurp(dir / "nl1" / "zscores.json"), slurp(dir / "nl3" / "zscores.json"));
}

TEST_F(Cli, SingleRealizationHasNullZscore) {
  const auto sim = simulated();
  ASSERT_EQ(run("null --network " + sim + " --ensemble 1 --metric clustering --out " + at("n")), 0);
  const auto z = load_json(dir / "n" / "zscores.json");
  EXPECT_TRUE(z["clustering"]["zscore"].is_null());
  EXPECT_TRUE(z["clustering"]["null_std"].is_null());
}

TEST_F(Cli, SimulateWithoutSocietalLinks) {
  ASSERT_EQ(run("simulate --n 400 --q 0 --p 0.5 --seed 1 --out " + at("s")), 0);
  const auto ls = load_json(dir / "s" / "linkstats.json");
  EXPECT_EQ(ls["societal"], 0);
  EXPECT_EQ(ls["societal_fraction"], 0.0);
  EXPECT_EQ(ls["nodes"], 400);
}

TEST_F(Cli, SimulateFromSeedGraph) {
  const auto sim = simulated();
  ASSERT_EQ(run("simulate --n 500 --seed-graph " + sim + " --seed-nodes 50 --q 0.1 --seed 1 --out " + at("s")), 0);
  const auto ls = load_json(dir / "s" / "linkstats.json");
  EXPECT_EQ(ls["nodes"], 500);
  EXPECT_EQ(ls["seed_nodes"], 50);
}

TEST_F(Cli, ReportTagsProvenance) {
  const auto sim = simulated();
  std::ofstream(dir / "e.txt") << "1 2\n2 3\n1 3\n3 4\n4 5\n2 5\n";
  ASSERT_EQ(run("ingest --format edgelist --input " + at("e.txt") + " --clean --out " + at("real")), 0);
  ASSERT_EQ(run("analyze --network " + at("real") + " --metrics --out " + at("ar")), 0);
  ASSERT_EQ(run("analyze --network " + sim + " --metrics --out " + at("as")), 0);
  EXPECT_EQ(run("report --inputs " + at("ar") + " --out " + at("r")), 2);
  ASSERT_EQ(run("report --inputs " + at("ar") + " " + at("as") + " --out " + at("r")), 0);
  const auto r = load_json(dir / "r" / "comparison.json");
  ASSERT_EQ(r["columns"].size(), 2u);
  EXPECT_EQ(r["columns"][0]["provenance"], "real");
  EXPECT_EQ(r["columns"][1]["provenance"], "simulated");
  EXPECT_EQ(r["rows"]["metrics.node_count"][0], 5);
  EXPECT_EQ(r["rows"]["metrics.node_count"][1], 400);
  EXPECT_TRUE(r["rows"].contains("metrics.clustering.average_directed"));
}

TEST_F(Cli, ReportRejectsSchemaMismatch) {
  const auto sim = simulated();
  ASSERT_EQ(run("analyze --network " + sim + " --metrics --no-paths --out " + at("a")), 0);
  fs::create_directories(dir / "bad");
  std::ofstream(dir / "bad" / "metrics.json") << "{\"schema\": \"other\"}\n";
  EXPECT_NE(run("report --inputs " + at("a") + " " + at("bad") + " --out " + at("r")), 0);
  EXPECT_FALSE(fs::exists(dir / "r"));
}

}  // namespace
