#pragma once

// Edge lists, node metadata tables and on-disk networks.
//
// A network directory holds `nodes.csv` (id,label,date,fields) and
// `edges.txt` (SNAP edge list over the same ids, optionally with a link type
// and birth step per line).

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "knet/csv.hpp"
#include "knet/graph.hpp"
#include "knet/metamath.hpp"

namespace knet {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

inline bool is_comment(std::string_view line) {
  auto p = line.find_first_not_of(" \t");
  return p != std::string_view::npos && line[p] == '#';
}

}  // namespace detail

struct EdgeListLoad {
  Digraph graph;  // external_ids holds the original identifiers
  std::size_t duplicates_dropped = 0;
  std::vector<Edge> rejected_self_loops;
};

// Reads whitespace-separated integer pairs. Identifiers are re-indexed densely
// in ascending order of their original value.
inline EdgeListLoad load_edge_list(std::istream& in) {
  std::vector<std::pair<std::int64_t, std::int64_t>> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_comment(line)) continue;
    auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError(lineno, "expected two node ids");
    std::int64_t s = 0, t = 0;
    if (!detail::parse_int(tok[0], s) || !detail::parse_int(tok[1], t))
      throw ParseError(lineno, "non-integer node id");
    raw.emplace_back(s, t);
  }
  std::vector<std::int64_t> ids;
  ids.reserve(raw.size() * 2);
  for (auto [s, t] : raw) {
    ids.push_back(s);
    ids.push_back(t);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index_of = [&](std::int64_t id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  GraphBuilder b(ids.size());
  b.reserve(raw.size());
  for (auto [s, t] : raw) b.add_edge(index_of(s), index_of(t));
  NodeAttributes attrs;
  attrs.external_ids = std::move(ids);
  auto built = std::move(b).build(std::move(attrs));
  return {std::move(built.graph), built.duplicates_dropped, std::move(built.rejected_self_loops)};
}

inline std::int64_t external_id(const Digraph& g, NodeId v) {
  const auto& ids = g.attributes().external_ids;
  return ids.empty() ? static_cast<std::int64_t>(v) : ids[v];
}

// SNAP-style edge list.
inline void write_edge_list(std::ostream& out, const Digraph& g, std::string_view title = "knet network") {
  out << "# Directed graph: " << title << "\n";
  out << "# Nodes: " << g.node_count() << " Edges: " << g.edge_count() << "\n";
  out << "# FromNodeId\tToNodeId\n";
  for (NodeId v = 0; v < g.node_count(); ++v)
    for (NodeId t : g.successors(v)) out << external_id(g, v) << '\t' << external_id(g, t) << '\n';
}

inline std::string format_fields(const FieldVector& f, int min_dims = 10) {
  int dims = std::max(min_dims, 32 - std::countl_zero(f.bits));
  std::string s(static_cast<std::size_t>(dims), '0');
  for (int d = 0; d < dims; ++d)
    if (f.test(d)) s[static_cast<std::size_t>(d)] = '1';
  return s;
}

inline std::optional<FieldVector> parse_fields(std::string_view s) {
  if (s.empty() || s.size() > 32) return std::nullopt;
  FieldVector f;
  for (std::size_t d = 0; d < s.size(); ++d) {
    if (s[d] == '1')
      f.bits |= 1u << d;
    else if (s[d] != '0')
      return std::nullopt;
  }
  return f;
}

struct MetadataLoad {
  Digraph graph;
  std::vector<std::string> unknown_ids;  // ids in the table but not in the graph
};

// Attaches label/date (and, with a `fields` column, field vectors) from a CSV
// table keyed by node id. Ids match external ids when the graph has them,
// node indices otherwise.
inline MetadataLoad load_csv_metadata(std::istream& in, const Digraph& g) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw ParseError(1, "missing header");
  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < header->fields.size(); ++k) col[header->fields[k]] = k;
  if (!col.contains("id") || !col.contains("label"))
    throw ParseError(header->line, "header must contain id,label[,date][,fields]");

  const auto n = g.node_count();
  std::unordered_map<std::int64_t, NodeId> lookup;
  for (NodeId v = 0; v < n; ++v) lookup.emplace(external_id(g, v), v);

  NodeAttributes attrs = g.attributes();
  if (!attrs.has_labels()) attrs.labels.assign(n, {});
  if (col.contains("date") && !attrs.has_dates()) attrs.dates.assign(n, std::nullopt);
  if (col.contains("fields") && !attrs.has_fields()) attrs.fields.assign(n, std::nullopt);

  MetadataLoad out;
  while (auto row = reader.next()) {
    if (row->fields.size() != header->fields.size())
      throw ParseError(row->line, "expected " + std::to_string(header->fields.size()) + " fields");
    const std::string& id_text = row->fields[col["id"]];
    std::int64_t id = 0;
    if (!detail::parse_int(std::string_view(id_text), id)) throw ParseError(row->line, "non-integer id");
    auto it = lookup.find(id);
    if (it == lookup.end()) {
      out.unknown_ids.push_back(id_text);
      continue;
    }
    const NodeId v = it->second;
    attrs.labels[v] = row->fields[col["label"]];
    if (auto c = col.find("date"); c != col.end() && !row->fields[c->second].empty()) {
      auto d = parse_date(row->fields[c->second]);
      if (!d) throw ParseError(row->line, "malformed date '" + row->fields[c->second] + "'");
      attrs.dates[v] = d;
    }
    if (auto c = col.find("fields"); c != col.end() && !row->fields[c->second].empty()) {
      auto f = parse_fields(row->fields[c->second]);
      if (!f) throw ParseError(row->line, "malformed field vector");
      attrs.fields[v] = f;
    }
  }
  out.graph = g.with_attributes(std::move(attrs));
  return out;
}

inline void write_nodes_csv(std::ostream& out, const Digraph& g) {
  const auto& a = g.attributes();
  out << "id,label,date" << (a.has_fields() ? ",fields" : "") << '\n';
  for (NodeId v = 0; v < g.node_count(); ++v) {
    out << external_id(g, v) << ',' << (a.has_labels() ? csv::escape(a.labels[v]) : "") << ',';
    if (a.has_dates() && a.dates[v]) out << a.dates[v]->str();
    if (a.has_fields()) {
      out << ',';
      if (a.fields[v]) out << format_fields(*a.fields[v]);
    }
    out << '\n';
  }
}

// Assigns a field index (0-based) to Metamath statements from a `label,field`
// table. Unknown labels are returned.
inline std::vector<std::string> assign_fields(std::vector<mm::Statement>& statements, std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->fields.size() < 2) throw ParseError(1, "expected header label,field");
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < statements.size(); ++k) index.emplace(statements[k].label, k);
  std::vector<std::string> unknown;
  while (auto row = reader.next()) {
    if (row->fields.size() < 2) throw ParseError(row->line, "expected label,field");
    int field = -1;
    if (!detail::parse_int(std::string_view(row->fields[1]), field) || field < 0 || field >= 32)
      throw ParseError(row->line, "field must be an integer in [0, 32)");
    auto it = index.find(row->fields[0]);
    if (it == index.end())
      unknown.push_back(row->fields[0]);
    else
      statements[it->second].field = field;
  }
  return unknown;
}

enum class LinkType : char { logical = 'L', societal = 'S' };

struct LinkInfo {
  LinkType type = LinkType::logical;
  std::int64_t birth = 0;
};

struct NetworkFiles {
  Digraph graph;
  // Per-edge link annotations in `graph.edges()` order, when the edge file
  // carries them.
  std::vector<LinkInfo> links;
};

// Writes nodes.csv and edges.txt. When `links` is given it must follow
// `g.edges()` order and adds the type and birth columns.
inline void save_network(const std::filesystem::path& dir, const Digraph& g,
                         const std::vector<LinkInfo>* links = nullptr, std::string_view title = "knet network") {
  std::filesystem::create_directories(dir);
  {
    std::ofstream nodes(dir / "nodes.csv", std::ios::binary);
    write_nodes_csv(nodes, g);
    if (!nodes) throw Error("cannot write " + (dir / "nodes.csv").string());
  }
  std::ofstream edges(dir / "edges.txt", std::ios::binary);
  if (!links) {
    write_edge_list(edges, g, title);
  } else {
    if (links->size() != g.edge_count()) throw Error("link annotations do not match edge count");
    edges << "# Directed graph: " << title << "\n";
    edges << "# Nodes: " << g.node_count() << " Edges: " << g.edge_count() << "\n";
    edges << "# FromNodeId\tToNodeId\tType\tBirth\n";
    std::size_t k = 0;
    for (NodeId v = 0; v < g.node_count(); ++v)
      for (NodeId t : g.successors(v)) {
        const auto& info = (*links)[k++];
        edges << external_id(g, v) << '\t' << external_id(g, t) << '\t' << static_cast<char>(info.type) << '\t'
              << info.birth << '\n';
      }
  }
  if (!edges) throw Error("cannot write " + (dir / "edges.txt").string());
}

// Loads a directory written by save_network. The node table defines the node
// set and order, so isolated nodes survive a round trip.
inline NetworkFiles load_network(const std::filesystem::path& dir) {
  std::ifstream nodes(dir / "nodes.csv", std::ios::binary);
  if (!nodes) throw Error("cannot open " + (dir / "nodes.csv").string());
  std::ifstream edges(dir / "edges.txt", std::ios::binary);
  if (!edges) throw Error("cannot open " + (dir / "edges.txt").string());

  csv::Reader reader(nodes);
  auto header = reader.next();
  if (!header || header->fields.size() < 3 || header->fields[0] != "id" || header->fields[1] != "label" ||
      header->fields[2] != "date")
    throw ParseError(1, "nodes.csv: expected header id,label,date[,fields]");
  const bool with_fields = header->fields.size() > 3 && header->fields[3] == "fields";

  NodeAttributes attrs;
  std::unordered_map<std::int64_t, NodeId> lookup;
  bool any_date = false, any_label = false;
  while (auto row = reader.next()) {
    if (row->fields.size() != header->fields.size()) throw ParseError(row->line, "nodes.csv: wrong field count");
    std::int64_t id = 0;
    if (!detail::parse_int(std::string_view(row->fields[0]), id)) throw ParseError(row->line, "nodes.csv: bad id");
    if (!lookup.emplace(id, static_cast<NodeId>(attrs.external_ids.size())).second)
      throw ParseError(row->line, "nodes.csv: duplicate id");
    attrs.external_ids.push_back(id);
    attrs.labels.push_back(row->fields[1]);
    any_label = any_label || !row->fields[1].empty();
    std::optional<Date> date;
    if (!row->fields[2].empty()) {
      date = parse_date(row->fields[2]);
      if (!date) throw ParseError(row->line, "nodes.csv: malformed date");
      any_date = true;
    }
    attrs.dates.push_back(date);
    if (with_fields) {
      std::optional<FieldVector> f;
      if (!row->fields[3].empty() && !(f = parse_fields(row->fields[3])))
        throw ParseError(row->line, "nodes.csv: malformed field vector");
      attrs.fields.push_back(f);
    }
  }
  if (!any_date) attrs.dates.clear();
  if (!any_label) attrs.labels.clear();
  if (lookup.empty()) throw Error("network in " + dir.string() + " has no nodes");

  GraphBuilder b(attrs.external_ids.size());
  std::map<Edge, LinkInfo> annotated;
  bool has_links = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(edges, line)) {
    ++lineno;
    if (detail::is_comment(line)) continue;
    auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 2 && tok.size() != 4) throw ParseError(lineno, "edges.txt: expected 2 or 4 columns");
    std::int64_t s = 0, t = 0;
    if (!detail::parse_int(tok[0], s) || !detail::parse_int(tok[1], t))
      throw ParseError(lineno, "edges.txt: non-integer node id");
    auto si = lookup.find(s), ti = lookup.find(t);
    if (si == lookup.end() || ti == lookup.end()) throw ParseError(lineno, "edges.txt: id not in nodes.csv");
    b.add_edge(si->second, ti->second);
    if (tok.size() == 4) {
      has_links = true;
      LinkInfo info;
      if (tok[2] == "L")
        info.type = LinkType::logical;
      else if (tok[2] == "S")
        info.type = LinkType::societal;
      else
        throw ParseError(lineno, "edges.txt: link type must be L or S");
      if (!detail::parse_int(tok[3], info.birth)) throw ParseError(lineno, "edges.txt: bad birth step");
      annotated[{si->second, ti->second}] = info;
    }
  }
  NetworkFiles out;
  out.graph = std::move(b).build(std::move(attrs)).graph;
  if (has_links) {
    if (annotated.size() != out.graph.edge_count()) throw Error("edges.txt: mixed annotated and plain lines");
    out.links.reserve(annotated.size());
    for (const auto& [e, info] : annotated) out.links.push_back(info);
  }
  return out;
}

}  // namespace knet
