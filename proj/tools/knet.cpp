// knet: command-line front end.
//
// Exit codes: 0 success, 1 computation error, 2 usage or input error.

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "knet/json.hpp"
#include "knet/knet.hpp"
#include "knet/parallel.hpp"
#include "knet/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace knet;

namespace {

constexpr std::string_view kAnalyzeSchema = "knet.analyze/1";

// Bad flags, missing or unreadable inputs.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

// Doubles are cut to 6 significant digits so JSON matches the CSV precision.
void round_floats(json& j) {
  if (j.is_number_float()) {
    j = std::strtod(num(j.get<double>()).c_str(), nullptr);
  } else if (j.is_structured()) {
    for (auto& v : j) round_floats(v);
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr)) throw Error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Everything a command produces, written in one go once all computation
// has succeeded.
class Outputs {
public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  std::ostringstream& file(const std::string& name) { return files_[name]; }
  void put_json(const std::string& name, json j) {
    round_floats(j);
    files_[name].str(j.dump(2) + "\n");
  }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : files_) out.push_back(k);
    return out;
  }
  void commit() {
    fs::create_directories(dir_);
    for (const auto& [name, content] : files_) {
      std::ofstream out(dir_ / name, std::ios::binary);
      out << content.str();
      if (!out) throw Error("cannot write " + (dir_ / name).string());
    }
  }

private:
  fs::path dir_;
  std::map<std::string, std::ostringstream> files_;
};

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  json config = json::object();
  json inputs = json::object();
  json seeds = json::object();
  json extra = json::object();

  void input(const fs::path& p) { inputs[p.generic_string()] = sha256_hex(read_file(p)); }

  json to_json(const Outputs& out) const {
    json j;
    j["tool"] = "knet";
    j["version"] = KNET_VERSION;
    j["command"] = command;
    j["argv"] = argv;
    j["config"] = config;
    j["config_hash"] = sha256_hex(config.dump());
    j["inputs"] = inputs;
    j["seeds"] = seeds;
    // Wall-clock time would break byte-identical reruns; only a pinned epoch is recorded.
    const char* epoch = std::getenv("SOURCE_DATE_EPOCH");
    j["timestamps"] = {{"source_date_epoch", epoch ? json(epoch) : json(nullptr)}};
    auto names = out.names();
    names.push_back("manifest.json");
    std::sort(names.begin(), names.end());
    j["outputs"] = names;
    for (auto& [k, v] : extra.items()) j[k] = v;
    return j;
  }
};

void finish(Outputs& out, const Manifest& m) {
  out.put_json("manifest.json", m.to_json(out));
  out.commit();
}

void require_file(const std::string& path) {
  if (path.empty() || !fs::is_regular_file(path)) throw InputError("input file not found: " + path);
}

struct LoadedNetwork {
  Dag dag;
  std::vector<LinkInfo> links;
  std::string source;  // command that produced the directory, when known
};

LoadedNetwork load_network_dir(const fs::path& dir, Manifest& m) {
  if (!fs::is_directory(dir)) throw InputError("network directory not found: " + dir.string());
  for (const char* f : {"nodes.csv", "edges.txt"})
    if (!fs::is_regular_file(dir / f)) throw InputError("network directory lacks " + std::string(f) + ": " + dir.string());
  m.input(dir / "nodes.csv");
  m.input(dir / "edges.txt");
  NetworkFiles files;
  try {
    files = load_network(dir);
  } catch (const ParseError& e) {
    throw InputError(e.what());
  }
  LoadedNetwork out{Dag::finalize(std::move(files.graph)), std::move(files.links), "unknown"};
  if (fs::is_regular_file(dir / "manifest.json")) {
    try {
      auto j = json::parse(read_file(dir / "manifest.json"));
      out.source = j.value("command", "unknown");
    } catch (const json::exception&) {
    }
  }
  return out;
}

void set_threads(unsigned threads) {
  if (threads > 0) setenv("KNET_THREADS", std::to_string(threads).c_str(), 1);
}

// Sub-seed k of a command seed, spaced so derived streams never overlap.
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t k) { return derive_seed(seed, k << 40); }

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string format, input, metadata, fields, out, title;
  bool clean = false;
};

int cmd_ingest(const IngestArgs& a, Manifest& m) {
  require_file(a.input);
  if (!a.metadata.empty()) require_file(a.metadata);
  if (!a.fields.empty()) require_file(a.fields);
  if (a.format == "metamath" && !a.metadata.empty()) throw InputError("--metadata applies to edge lists; use --fields");
  if (a.format == "edgelist" && !a.fields.empty()) throw InputError("--fields applies to Metamath input");
  m.config = {{"format", a.format}, {"clean", a.clean}, {"title", a.title}};
  m.input(a.input);
  if (!a.metadata.empty()) m.input(a.metadata);
  if (!a.fields.empty()) m.input(a.fields);

  json report;
  Digraph g;
  std::ifstream in(a.input, std::ios::binary);
  try {
    if (a.format == "metamath") {
      auto statements = mm::parse(in);
      if (!a.fields.empty()) {
        std::ifstream f(a.fields, std::ios::binary);
        report["unknown_field_labels"] = assign_fields(statements, f);
      }
      const auto c = mm::count_kinds(statements);
      report["statements"] = {{"axioms", c.axioms}, {"definitions", c.definitions}, {"syntax", c.syntax},
                              {"theorems", c.theorems}};
      g = mm::theorem_network(statements);
    } else {
      auto loaded = load_edge_list(in);
      report["duplicates_dropped"] = loaded.duplicates_dropped;
      report["self_loops_dropped"] = loaded.rejected_self_loops.size();
      g = std::move(loaded.graph);
      if (!a.metadata.empty()) {
        std::ifstream meta(a.metadata, std::ios::binary);
        auto md = load_csv_metadata(meta, g);
        report["unknown_metadata_ids"] = md.unknown_ids.size();
        g = std::move(md.graph);
      }
    }
  } catch (const ParseError& e) {
    throw InputError(a.input + ":" + std::to_string(e.line()) + ": " + e.what());
  }

  Outputs out(a.out);
  if (a.clean) {
    auto r = clean(g);
    report["cleaned"] = true;
    report["cleaning"] = to_json(r.report);
    g = std::move(r.dag);
  } else {
    report["cleaned"] = false;
    if (!is_acyclic(g)) report["warning"] = "network has cycles; analyze requires --clean";
  }
  report["nodes"] = g.node_count();
  report["links"] = g.edge_count();
  write_nodes_csv(out.file("nodes.csv"), g);
  write_edge_list(out.file("edges.txt"), g, a.title);
  out.put_json("cleaning.json", report);
  finish(out, m);
  return 0;
}

// --------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string network, out, disruption;
  bool metrics = false, gini = false, self_degree = false, no_paths = false;
  int window = 10;
  bool window_set = false;
  std::vector<std::string> groups;
  std::size_t bootstrap = 1000;
  std::size_t path_sources = 10'000;
  std::size_t path_exact_limit = 50'000;
  std::uint64_t seed = 0;
};

void write_curve(std::ostream& os, const metrics::DegreeCcdf& c) {
  os << "k,value\n";
  for (const auto& p : c.points) os << p.k << ',' << num(p.fraction) << '\n';
}

void write_bootstrap(std::ostream& os, const stats::BootstrapDistribution& d) {
  os << "replicate,mean\n";
  for (std::size_t r = 0; r < d.replicate_means.size(); ++r) os << r << ',' << num(d.replicate_means[r]) << '\n';
}

void write_groups(std::ostream& os, const std::vector<disruption::GroupStat>& groups) {
  os << "left,right,nodes,defined,mean_disruption,correlation\n";
  for (const auto& s : groups)
    os << num(s.left) << ',' << num(s.right) << ',' << s.nodes << ',' << s.defined << ',' << num(s.mean_disruption)
       << ',' << num(s.correlation) << '\n';
}

// Top and bottom 20% by `key` (node id breaks ties), compared on `value`.
json top_bottom_test(const std::vector<stats::Keyed>& key, const std::vector<double>& value, std::size_t replicates,
                     std::uint64_t seed, Outputs& out, const std::string& stem) {
  auto split = stats::top_bottom_split(key, 0.2);
  std::vector<double> top, bottom;
  for (const auto& k : split.top) top.push_back(value[k.node]);
  for (const auto& k : split.bottom) bottom.push_back(value[k.node]);
  auto t = stats::bootstrap_two_sample_test(top, bottom, replicates, seed);
  t.a.group_label = "top";
  t.b.group_label = "bottom";
  write_bootstrap(out.file(stem + "_top.csv"), t.a);
  write_bootstrap(out.file(stem + "_bottom.csv"), t.b);
  return {{"method", std::string(stats::BootstrapTest::method)},
          {"fraction", 0.2},
          {"replicates", replicates},
          {"seed", seed},
          {"top_size", top.size()},
          {"bottom_size", bottom.size()},
          {"top_mean", stats::mean(top)},
          {"bottom_mean", stats::mean(bottom)},
          {"t_statistic", t.t_statistic},
          {"p_value", t.p_value}};
}

int cmd_analyze(const AnalyzeArgs& a, Manifest& m) {
  if (a.gini && a.disruption.empty()) throw InputError("--gini needs --disruption");
  if (!a.groups.empty() && a.disruption.empty()) throw InputError("--groups needs --disruption");
  if (a.window < 0) throw InputError("--window must be nonnegative");
  auto net = load_network_dir(a.network, m);
  const Dag& g = net.dag;
  m.config = {{"metrics", a.metrics},         {"disruption", a.disruption}, {"window", a.window},
              {"window_set", a.window_set},   {"gini", a.gini},             {"self_degree", a.self_degree},
              {"groups", a.groups},           {"bootstrap", a.bootstrap},   {"paths", !a.no_paths},
              {"path_sources", a.path_sources}, {"path_exact_limit", a.path_exact_limit}};
  m.seeds["seed"] = a.seed;
  m.extra["source"] = net.source;

  Outputs out(a.out);
  json report;
  report["schema"] = kAnalyzeSchema;
  report["source"] = net.source;
  report["network"] = {{"nodes", g.node_count()}, {"links", g.edge_count()}};
  const auto gen = topological_generations(g);
  {
    const auto sizes = gen.generation_sizes();
    report["generations"] = {{"count", gen.generation_count}, {"zeroth", sizes.empty() ? 0 : sizes[0]}};
  }

  if (a.metrics) {
    metrics::SummaryOptions opt;
    opt.path_lengths = !a.no_paths;
    opt.paths.sampled_sources = a.path_sources;
    opt.paths.exact_limit = a.path_exact_limit;
    opt.paths.seed = sub_seed(a.seed, 3);
    m.seeds["path_sampling"] = opt.paths.seed;
    report["metrics"] = to_json(metrics::summary(g, opt));
    write_curve(out.file("ccdf_total.csv"), metrics::degree_ccdf(g, metrics::DegreeKind::total));
    write_curve(out.file("ccdf_in.csv"), metrics::degree_ccdf(g, metrics::DegreeKind::in));
    write_curve(out.file("ccdf_out.csv"), metrics::degree_ccdf(g, metrics::DegreeKind::out));
  }

  if (a.self_degree) {
    auto sd = metrics::self_degree_correlation(g);
    auto& os = out.file("self_degree.csv");
    os << "bin_left,bin_right,mean,stderr,count\n";
    for (const auto& b : sd.curve.bins)
      os << num(b.left) << ',' << num(b.right) << ',' << num(b.mean) << ',' << num(b.stderr_) << ',' << b.count << '\n';
    json j;
    j["spearman"] = to_json(sd.spearman);
    j["bins"] = json::array();
    for (const auto& b : sd.curve.bins)
      j["bins"].push_back({{"left", b.left}, {"right", b.right}, {"count", b.count}, {"mean", opt_json(b.mean)}});
    std::vector<stats::Keyed> outdeg;
    std::vector<double> indeg(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
      outdeg.push_back({v, static_cast<double>(g.out_degree(v))});
      indeg[v] = static_cast<double>(g.in_degree(v));
    }
    if (g.node_count() >= 2) {
      m.seeds["bootstrap_in_degree"] = sub_seed(a.seed, 1);
      j["bootstrap_in_degree"] = top_bottom_test(outdeg, indeg, a.bootstrap, sub_seed(a.seed, 1), out, "bootstrap_indegree");
    }
    report["self_degree"] = j;
  }

  if (!a.disruption.empty()) {
    std::vector<disruption::Record> records;
    json j;
    j["mode"] = a.disruption;
    if (a.disruption == "full") {
      records = disruption::disruption_full(g, gen);
    } else if (a.disruption == "windowed") {
      records = disruption::disruption_windowed(g, gen, a.window);
      j["window"] = a.window;
    } else {
      std::optional<int> years;
      if (a.window_set) years = a.window;
      try {
        records = disruption::disruption_by_date(g, years);
      } catch (const Error& e) {
        throw InputError(e.what());
      }
      j["window_years"] = opt_json(years);
      // Generation-based counterpart on the same nodes.
      auto by_gen = years ? disruption::disruption_windowed(g, gen, *years) : disruption::disruption_full(g, gen);
      std::vector<double> x, y;
      for (NodeId v = 0; v < g.node_count(); ++v)
        if (records[v].disruption && by_gen[v].disruption) {
          x.push_back(*by_gen[v].disruption);
          y.push_back(*records[v].disruption);
        }
      json cmp;
      cmp["generation_mode"] = years ? "windowed" : "full";
      cmp["n"] = x.size();
      if (x.size() >= 3) {
        cmp["pearson"] = to_json(stats::correlate(x, y, stats::CorrelationKind::pearson));
        cmp["spearman"] = to_json(stats::correlate(x, y, stats::CorrelationKind::spearman));
        cmp["kendall"] = to_json(stats::correlate(x, y, stats::CorrelationKind::kendall));
      }
      if (!x.empty()) {
        auto& os = out.file("qq_date_generation.csv");
        os << "level,generation,date\n";
        const auto pts = stats::qq_points(x, y, 100);
        for (std::size_t k = 0; k < pts.size(); ++k)
          os << num((static_cast<double>(k) + 0.5) / 100.0) << ',' << num(pts[k].first) << ',' << num(pts[k].second)
             << '\n';
      }
      j["date_vs_generation"] = cmp;
    }
    {
      auto& os = out.file("disruption.csv");
      os << "node,disruption,citations,mode\n";
      for (const auto& r : records)
        os << external_id(g, r.node) << ',' << num(r.disruption) << ',' << r.citations << ','
           << disruption::to_string(r.mode) << '\n';
    }
    const auto def = disruption::defined(records);
    j["nodes"] = records.size();
    j["defined"] = def.nodes.size();
    j["mean"] = opt_json(disruption::mean_disruption(records));
    j["citation_correlation"] = def.nodes.size() >= 3 ? to_json(disruption::citation_correlation(records)) : json(nullptr);
    if (a.gini) j["gini"] = def.nodes.size() >= 2 ? opt_json(disruption::gini(records)) : json(nullptr);
    if (def.nodes.size() >= 2) {
      std::vector<stats::Keyed> cites;
      for (std::size_t k = 0; k < def.nodes.size(); ++k) cites.push_back({k, def.citations[k]});
      m.seeds["bootstrap_disruption"] = sub_seed(a.seed, 2);
      j["bootstrap_by_citations"] =
          top_bottom_test(cites, def.disruption, a.bootstrap, sub_seed(a.seed, 2), out, "bootstrap_disruption");
    }
    if (!a.groups.empty()) {
      const auto prefs = disruption::reference_metrics(g, gen);
      bool wrote_prefs = false;
      for (const auto& kind : a.groups) {
        if (kind == "evolution") {
          try {
            write_groups(out.file("groups_evolution.csv"), disruption::grouped_evolution(gen, records));
          } catch (const Error& e) {
            throw InputError(std::string("--groups evolution: ") + e.what());
          }
        } else {
          const auto key = kind == "popularity" ? disruption::PreferenceKey::popularity : disruption::PreferenceKey::age;
          write_groups(out.file("groups_" + kind + ".csv"), disruption::grouped_by_preference(prefs, records, key));
          if (!wrote_prefs) {
            auto& os = out.file("preference.csv");
            os << "node,ref_popularity,ref_age\n";
            for (const auto& p : prefs)
              os << external_id(g, p.node) << ',' << num(p.reference_popularity) << ',' << num(p.reference_age) << '\n';
            wrote_prefs = true;
          }
        }
      }
    }
    report["disruption"] = j;
  }

  out.put_json("metrics.json", report);
  finish(out, m);
  return 0;
}

// ------------------------------------------------------------------ null

struct NullArgs {
  std::string network, out, disruption = "windowed";
  std::size_t ensemble = 10;
  std::uint64_t seed = 0;
  int window = 10;
  std::vector<std::string> metrics;
};

std::vector<disruption::Record> disruption_for(const Dag& g, const std::string& mode, int window) {
  const auto gen = topological_generations(g);
  return mode == "full" ? disruption::disruption_full(g, gen) : disruption::disruption_windowed(g, gen, window);
}

double metric_value(const Dag& g, const std::string& metric, const std::string& mode, int window) {
  if (metric == "clustering") return metrics::clustering_directed(g).average;
  const auto records = disruption_for(g, mode, window);
  if (metric == "mean-disruption") return disruption::mean_disruption(records).value_or(NAN);
  const auto c = disruption::citation_correlation(records);
  return c.coefficient.value_or(NAN);
}

int cmd_null(const NullArgs& a, Manifest& m) {
  if (a.ensemble < 1) throw InputError("--ensemble must be at least 1");
  auto net = load_network_dir(a.network, m);
  const Dag& g = net.dag;
  m.config = {{"ensemble", a.ensemble}, {"metrics", a.metrics}, {"disruption", a.disruption}, {"window", a.window}};
  m.seeds["base_seed"] = a.seed;
  m.extra["source"] = net.source;

  // Realization i uses seed base + i for every metric.
  std::vector<std::vector<double>> values(a.metrics.size(), std::vector<double>(a.ensemble));
  parallel_for(a.ensemble, default_threads(), [&](std::size_t i) {
    const auto r = null::randomize_dag(g, derive_seed(a.seed, i));
    for (std::size_t k = 0; k < a.metrics.size(); ++k) values[k][i] = metric_value(r, a.metrics[k], a.disruption, a.window);
  }, 1);

  Outputs out(a.out);
  json z;
  for (std::size_t k = 0; k < a.metrics.size(); ++k) {
    const auto& name = a.metrics[k];
    auto& os = out.file("null_" + name + ".csv");
    os << "realization,seed,metric,value\n";
    std::vector<double> finite;
    for (std::size_t i = 0; i < a.ensemble; ++i) {
      os << i << ',' << derive_seed(a.seed, i) << ',' << name << ','
         << (std::isfinite(values[k][i]) ? num(values[k][i]) : std::string()) << '\n';
      if (std::isfinite(values[k][i])) finite.push_back(values[k][i]);
    }
    const double real = metric_value(g, name, a.disruption, a.window);
    json e;
    e["real"] = std::isfinite(real) ? json(real) : json(nullptr);
    e["null_mean"] = finite.empty() ? json(nullptr) : json(stats::mean(finite));
    e["null_std"] = finite.size() < 2 ? json(nullptr) : json(stats::sample_stddev(finite));
    e["realizations"] = finite.size();
    e["zscore"] = std::isfinite(real) ? opt_json(null::zscore(real, finite)) : json(nullptr);
    z[name] = e;
  }
  out.put_json("zscores.json", z);
  finish(out, m);
  return 0;
}

// -------------------------------------------------------------- simulate

struct SimulateArgs {
  gen::GenParams prm;
  std::string seed_graph, out;
  std::size_t seed_nodes = 100;
  bool calibrate = false;
  double target_m = 0.0;
  std::vector<double> w_grid, a_grid;
  int realizations = 3;
  double p_min = 0.01, p_max = 1.0;
  int bisection_steps = 14;
};

int cmd_simulate(SimulateArgs a, Manifest& m) {
  if (a.calibrate && !(a.target_m > 0.0)) throw InputError("--calibrate needs a positive --target-m");
  try {
    gen::validate(a.prm);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  Dag seed_graph;
  std::string seed_source;
  if (!a.seed_graph.empty()) {
    auto net = load_network_dir(a.seed_graph, m);
    const auto k = std::min(a.seed_nodes, net.dag.node_count());
    std::vector<NodeId> keep(k);
    std::iota(keep.begin(), keep.end(), NodeId{0});
    seed_graph = Dag::finalize(induced_subgraph(net.dag, keep).graph);
    seed_source = "first " + std::to_string(k) + " nodes of " + a.seed_graph;
  } else {
    seed_graph = gen::default_seed_graph(a.seed_nodes, sub_seed(a.prm.seed, 4), a.prm.dims, a.prm.vector_density);
    m.seeds["seed_graph"] = sub_seed(a.prm.seed, 4);
    seed_source = "synthetic";
  }
  if (a.prm.target_n <= seed_graph.node_count()) throw InputError("--n must exceed the seed graph size");

  json cal = nullptr;
  if (a.calibrate) {
    gen::CalibrationSpace space;
    if (!a.w_grid.empty()) space.w_values = a.w_grid;
    if (!a.a_grid.empty()) space.a_values = a.a_grid;
    space.realizations = a.realizations;
    space.p_min = a.p_min;
    space.p_max = a.p_max;
    space.bisection_steps = a.bisection_steps;
    auto r = gen::calibrate(a.prm, seed_graph, a.target_m, space);
    cal = {{"target_m", a.target_m},
           {"achieved_mean_m", r.achieved_mean_m},
           {"relative_error", r.relative_error},
           {"evaluations", r.evaluations},
           {"realizations", space.realizations},
           {"w_grid", space.w_values},
           {"a_grid", space.a_values}};
    a.prm = r.params;
  }

  auto g = gen::generate(a.prm, seed_graph);
  const auto s = gen::link_type_stats(g);
  const json params = {{"p", a.prm.p},       {"w", a.prm.w},
                       {"a", a.prm.a},       {"q", a.prm.q},
                       {"dims", a.prm.dims}, {"vector_density", a.prm.vector_density},
                       {"target_n", a.prm.target_n}, {"seed", a.prm.seed}};
  m.config = {{"params", params}, {"calibrate", a.calibrate}, {"target_m", a.target_m},
              {"seed_graph", seed_source}, {"seed_nodes", a.seed_nodes}};
  m.seeds["generator"] = a.prm.seed;
  m.extra["params"] = params;
  m.extra["achieved"] = {{"nodes", g.dag.node_count()}, {"links", g.dag.edge_count()}};
  m.extra["calibration"] = cal;

  Outputs out(a.out);
  {
    std::ostringstream edges;
    write_nodes_csv(out.file("nodes.csv"), g.dag);
    auto& os = out.file("edges.txt");
    os << "# Directed graph: knet simulation q=" << num(a.prm.q) << "\n";
    os << "# Nodes: " << g.dag.node_count() << " Edges: " << g.dag.edge_count() << "\n";
    os << "# FromNodeId\tToNodeId\tType\tBirth\n";
    std::size_t k = 0;
    for (NodeId v = 0; v < g.dag.node_count(); ++v)
      for (NodeId t : g.dag.successors(v)) {
        const auto& info = g.links[k++];
        os << v << '\t' << t << '\t' << static_cast<char>(info.type) << '\t' << info.birth << '\n';
      }
  }
  json ls;
  ls["nodes"] = g.dag.node_count();
  ls["links"] = g.dag.edge_count();
  ls["seed_nodes"] = g.seed_nodes;
  ls["logical"] = s.logical;
  ls["societal"] = s.societal;
  ls["societal_fraction"] = s.societal_fraction;
  ls["fraction_at_most_two_logical"] = s.fraction_at_most_two_logical;
  ls["logical_out_histogram"] = s.logical_out_histogram;
  ls["params"] = params;
  ls["calibration"] = cal;
  out.put_json("linkstats.json", ls);
  finish(out, m);
  return 0;
}

// ---------------------------------------------------------------- report

void flatten(const json& j, const std::string& prefix, std::map<std::string, json>& out) {
  if (j.is_object()) {
    for (auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_number() || j.is_null() || j.is_boolean() || j.is_string()) {
    out[prefix] = j;
  }
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_dir, Manifest& m) {
  if (inputs.size() < 2) throw InputError("report needs at least two --inputs");
  json columns = json::array();
  std::vector<std::map<std::string, json>> flat;
  std::set<std::string> keys;
  for (const auto& dir : inputs) {
    const fs::path p = fs::path(dir) / "metrics.json";
    if (!fs::is_regular_file(p)) throw InputError("no metrics.json in " + dir);
    m.input(p);
    json j;
    try {
      j = json::parse(read_file(p));
    } catch (const json::exception& e) {
      throw InputError(p.string() + ": " + e.what());
    }
    if (j.value("schema", "") != kAnalyzeSchema) throw InputError(p.string() + ": not a knet analyze report");
    const std::string source = j.value("source", "unknown");
    const std::string provenance = source == "ingest" ? "real" : source == "simulate" ? "simulated" : "unknown";
    columns.push_back({{"name", fs::path(dir).lexically_normal().filename().string()},
                       {"path", dir},
                       {"source", source},
                       {"provenance", provenance}});
    std::map<std::string, json> f;
    flatten(j, "", f);
    f.erase("schema");
    f.erase("source");
    for (const auto& [k, v] : f) keys.insert(k);
    flat.push_back(std::move(f));
  }
  json rows = json::object();
  for (const auto& k : keys) {
    json row = json::array();
    for (const auto& f : flat) {
      auto it = f.find(k);
      row.push_back(it == f.end() ? json(nullptr) : it->second);
    }
    rows[k] = row;
  }
  m.config = {{"inputs", inputs}};
  Outputs out(out_dir);
  out.put_json("comparison.json", {{"columns", columns}, {"rows", rows}});
  finish(out, m);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knet: knowledge-network analysis and simulation"};
  app.set_version_flag("--version", std::string(KNET_VERSION));
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker thread cap (default: KNET_THREADS or all cores)");

  IngestArgs ia;
  auto* ingest = app.add_subcommand("ingest", "build a network from Metamath or an edge list");
  ingest->add_option("--format", ia.format)->required()->check(CLI::IsMember({"metamath", "edgelist"}));
  ingest->add_option("--input", ia.input)->required();
  ingest->add_option("--metadata", ia.metadata, "id,label,date CSV (edge lists)");
  ingest->add_option("--fields", ia.fields, "label,field CSV (Metamath)");
  ingest->add_flag("--clean", ia.clean, "isolates, largest component, cycle removal");
  ingest->add_option("--title", ia.title, "title line for edges.txt")->default_val("knet network");
  ingest->add_option("--out", ia.out)->required();

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "structural and disruption metrics");
  analyze->add_option("--network", aa.network)->required();
  analyze->add_option("--out", aa.out)->required();
  analyze->add_flag("--metrics", aa.metrics, "summary metrics and degree CCDFs");
  analyze->add_option("--disruption", aa.disruption)->check(CLI::IsMember({"full", "windowed", "date"}));
  auto* window_opt = analyze->add_option("--window", aa.window, "generations (windowed) or years (date)");
  analyze->add_flag("--gini", aa.gini);
  analyze->add_flag("--self-degree", aa.self_degree);
  analyze->add_option("--groups", aa.groups)->check(CLI::IsMember({"evolution", "popularity", "age"}));
  analyze->add_option("--bootstrap", aa.bootstrap, "bootstrap replicates")->check(CLI::PositiveNumber);
  analyze->add_flag("--no-paths", aa.no_paths, "skip average path lengths");
  analyze->add_option("--path-sources", aa.path_sources, "BFS sources when sampling");
  analyze->add_option("--path-exact-limit", aa.path_exact_limit, "largest network with exact path lengths");
  analyze->add_option("--seed", aa.seed);

  NullArgs na;
  auto* nullc = app.add_subcommand("null", "degree-preserving null-model ensemble and Z-scores");
  nullc->add_option("--network", na.network)->required();
  nullc->add_option("--out", na.out)->required();
  nullc->add_option("--ensemble", na.ensemble)->default_val(10);
  nullc->add_option("--seed", na.seed);
  nullc->add_option("--metric", na.metrics)
      ->required()
      ->check(CLI::IsMember({"clustering", "disruption-corr", "mean-disruption"}));
  nullc->add_option("--disruption", na.disruption)->check(CLI::IsMember({"full", "windowed"}))->default_val("windowed");
  nullc->add_option("--window", na.window)->default_val(10);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "grow a network with the logical/societal model");
  sim->add_option("--p", sa.prm.p)->default_val(0.5);
  sim->add_option("--w", sa.prm.w)->default_val(0.0);
  sim->add_option("--a", sa.prm.a)->default_val(1.0);
  sim->add_option("--q", sa.prm.q)->default_val(0.0);
  sim->add_option("--n", sa.prm.target_n)->required();
  sim->add_option("--dims", sa.prm.dims)->default_val(10);
  sim->add_option("--density", sa.prm.vector_density)->default_val(0.3);
  sim->add_option("--seed", sa.prm.seed);
  sim->add_option("--seed-graph", sa.seed_graph, "network directory; its first --seed-nodes nodes seed the growth");
  sim->add_option("--seed-nodes", sa.seed_nodes)->default_val(100);
  sim->add_flag("--calibrate", sa.calibrate, "fit p (and w, a from grids) to --target-m");
  sim->add_option("--target-m", sa.target_m);
  sim->add_option("--w-grid", sa.w_grid);
  sim->add_option("--a-grid", sa.a_grid);
  sim->add_option("--realizations", sa.realizations)->default_val(3);
  sim->add_option("--p-min", sa.p_min)->default_val(0.01);
  sim->add_option("--p-max", sa.p_max)->default_val(1.0);
  sim->add_option("--bisection-steps", sa.bisection_steps)->default_val(14);
  sim->add_option("--out", sa.out)->required();

  std::vector<std::string> report_inputs;
  std::string report_out;
  auto* report = app.add_subcommand("report", "compare analyzed networks side by side");
  report->add_option("--inputs", report_inputs)->required();
  report->add_option("--out", report_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  aa.window_set = window_opt->count() > 0;

  Manifest m;
  for (int i = 1; i < argc; ++i) m.argv.emplace_back(argv[i]);
  set_threads(threads);
  try {
    if (*ingest) {
      m.command = "ingest";
      return cmd_ingest(ia, m);
    }
    if (*analyze) {
      m.command = "analyze";
      return cmd_analyze(aa, m);
    }
    if (*nullc) {
      m.command = "null";
      return cmd_null(na, m);
    }
    if (*sim) {
      m.command = "simulate";
      return cmd_simulate(sa, m);
    }
    m.command = "report";
    return cmd_report(report_inputs, report_out, m);
  } catch (const InputError& e) {
    std::cerr << "knet: " << e.what() << "\n";
    return 2;
  } catch (const gen::CalibrationError& e) {
    std::cerr << "knet: calibration failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "knet: " << e.what() << "\n";
    return 1;
  }
}
