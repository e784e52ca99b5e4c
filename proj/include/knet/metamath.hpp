#pragma once

// Dependency extraction from Metamath (.mm) databases.
//
// Only what is needed to recover which statements a proof uses is parsed:
// scoping, statement kinds, typecodes and proof label references. Proofs are
// not verified and compressed step streams are checked for alphabet only.

#include <cctype>
#include <istream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "knet/error.hpp"
#include "knet/graph.hpp"

namespace knet::mm {

enum class StatementKind { axiom, definition, syntax, theorem, hypothesis, other };

inline std::string_view to_string(StatementKind k) {
  switch (k) {
    case StatementKind::axiom: return "axiom";
    case StatementKind::definition: return "definition";
    case StatementKind::syntax: return "syntax";
    case StatementKind::theorem: return "theorem";
    case StatementKind::hypothesis: return "hypothesis";
    case StatementKind::other: return "other";
  }
  return "other";
}

struct Statement {
  std::string label;
  StatementKind kind = StatementKind::other;
  std::string typecode;
  std::vector<std::string> proof_labels;  // distinct, in order of first use
  std::size_t line = 0;
  std::optional<int> field;
};

inline constexpr std::string_view kProvableTypecode = "|-";

// Kind of an `$a` statement from its typecode and label.
inline StatementKind classify_axiomatic(std::string_view label, std::string_view typecode) {
  if (typecode != kProvableTypecode) return StatementKind::syntax;
  if (label.starts_with("ax-")) return StatementKind::axiom;
  if (label.starts_with("df-")) return StatementKind::definition;
  return StatementKind::axiom;
}

namespace detail {

struct Token {
  std::string text;
  std::size_t line;
};

class Tokenizer {
public:
  explicit Tokenizer(std::istream& in) : in_(in) {}

  // Next token outside comments, or nullopt at end of input.
  std::optional<Token> next() {
    for (;;) {
      auto tok = raw();
      if (!tok) return tok;
      if (tok->text != "$(") return tok;
      const std::size_t start = tok->line;
      for (;;) {
        auto inner = raw();
        if (!inner) throw ParseError(start, "unterminated comment");
        if (inner->text == "$)") break;
        if (inner->text.find("$(") != std::string::npos || inner->text.find("$)") != std::string::npos)
          throw ParseError(inner->line, "comment delimiter embedded in token '" + inner->text + "'");
      }
    }
  }

  std::size_t line() const noexcept { return line_; }

private:
  std::optional<Token> raw() {
    int c;
    while ((c = in_.get()) != EOF) {
      if (c == '\n') ++line_;
      if (!std::isspace(c)) break;
    }
    if (c == EOF) return std::nullopt;
    Token t{std::string(1, static_cast<char>(c)), line_};
    while ((c = in_.peek()) != EOF && !std::isspace(c)) {
      if (c < 33 || c > 126) throw ParseError(line_, "non-printable character in token");
      t.text.push_back(static_cast<char>(in_.get()));
    }
    if (static_cast<unsigned char>(t.text[0]) < 33 || static_cast<unsigned char>(t.text[0]) > 126)
      throw ParseError(line_, "non-printable character in token");
    return t;
  }

  std::istream& in_;
  std::size_t line_ = 1;
};

inline bool valid_label(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) return false;
  return true;
}

}  // namespace detail

// Parses a database and returns one Statement per `$a`/`$p` statement, in file
// order. Hypothesis labels are resolved but never reported as dependencies.
inline std::vector<Statement> parse(std::istream& in) {
  detail::Tokenizer tok(in);
  std::vector<Statement> out;
  // label -> true when the label names a hypothesis ($e/$f)
  std::unordered_map<std::string, bool> labels;
  std::size_t depth = 0;

  auto expect_more = [&](std::size_t line, std::string_view what) {
    auto t = tok.next();
    if (!t) throw ParseError(line, "unexpected end of input in " + std::string(what));
    return *t;
  };
  auto skip_to_end = [&](std::size_t line, std::string_view what) {
    std::vector<detail::Token> body;
    for (;;) {
      auto t = expect_more(line, what);
      if (t.text == "$.") return body;
      if (t.text.size() == 2 && t.text[0] == '$')
        throw ParseError(t.line, "unexpected keyword " + t.text + " in " + std::string(what));
      body.push_back(std::move(t));
    }
  };

  while (auto t = tok.next()) {
    const std::string& s = t->text;
    if (s == "$c" || s == "$v" || s == "$d") {
      skip_to_end(t->line, s + " statement");
    } else if (s == "${") {
      ++depth;
    } else if (s == "$}") {
      if (depth == 0) throw ParseError(t->line, "unbalanced $}");
      --depth;
    } else if (s == "$[") {
      throw ParseError(t->line, "file inclusion is not supported");
    } else if (s.starts_with("$")) {
      throw ParseError(t->line, "unexpected token " + s);
    } else {
      if (!detail::valid_label(s)) throw ParseError(t->line, "malformed label '" + s + "'");
      auto kw = expect_more(t->line, "statement " + s);
      if (labels.contains(s)) throw ParseError(t->line, "duplicate label '" + s + "'");
      if (kw.text == "$f" || kw.text == "$e") {
        auto body = skip_to_end(t->line, "hypothesis " + s);
        if (body.empty()) throw ParseError(t->line, "hypothesis " + s + " has no typecode");
        labels.emplace(s, true);
      } else if (kw.text == "$a") {
        auto body = skip_to_end(t->line, "axiom " + s);
        if (body.empty()) throw ParseError(t->line, "statement " + s + " has no typecode");
        out.push_back({s, classify_axiomatic(s, body.front().text), body.front().text, {}, t->line, {}});
        labels.emplace(s, false);
      } else if (kw.text == "$p") {
        Statement st{s, StatementKind::theorem, {}, {}, t->line, {}};
        for (;;) {
          auto m = expect_more(t->line, "theorem " + s);
          if (m.text == "$=") break;
          if (m.text.size() == 2 && m.text[0] == '$')
            throw ParseError(m.line, "unexpected keyword " + m.text + " in theorem " + s);
          if (st.typecode.empty()) st.typecode = m.text;
        }
        if (st.typecode.empty()) throw ParseError(t->line, "statement " + s + " has no typecode");
        std::unordered_set<std::string> seen;
        auto use = [&](const detail::Token& ref) {
          if (ref.text == "?") return;
          auto it = labels.find(ref.text);
          if (it == labels.end())
            throw ParseError(ref.line, "unknown label '" + ref.text + "' in proof of " + s);
          if (!it->second && seen.insert(ref.text).second) st.proof_labels.push_back(ref.text);
        };
        auto proof = skip_to_end(t->line, "proof of " + s);
        if (!proof.empty() && proof.front().text == "(") {
          std::size_t k = 1;
          for (; k < proof.size() && proof[k].text != ")"; ++k) use(proof[k]);
          if (k == proof.size()) throw ParseError(t->line, "unterminated label list in proof of " + s);
          for (++k; k < proof.size(); ++k)
            for (char c : proof[k].text)
              if (!((c >= 'A' && c <= 'Z') || c == '?'))
                throw ParseError(proof[k].line, "invalid character in compressed proof of " + s);
        } else {
          for (const auto& ref : proof) use(ref);
        }
        out.push_back(std::move(st));
        labels.emplace(s, false);
      } else {
        throw ParseError(kw.line, "expected $f, $e, $a or $p after label '" + s + "'");
      }
    }
  }
  if (depth != 0) throw ParseError(tok.line(), "unclosed ${ scope");
  return out;
}

inline std::vector<Statement> parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

struct StatementCounts {
  std::size_t axioms = 0, definitions = 0, syntax = 0, theorems = 0;
};

inline StatementCounts count_kinds(const std::vector<Statement>& statements) {
  StatementCounts c;
  for (const auto& s : statements) {
    switch (s.kind) {
      case StatementKind::axiom: ++c.axioms; break;
      case StatementKind::definition: ++c.definitions; break;
      case StatementKind::syntax: ++c.syntax; break;
      case StatementKind::theorem: ++c.theorems; break;
      default: break;
    }
  }
  return c;
}

// Dependency network over theorems and axioms. Node ids follow file order;
// labels (and fields, when assigned) are attached as node attributes.
inline Dag theorem_network(const std::vector<Statement>& statements) {
  std::unordered_map<std::string_view, NodeId> index;
  NodeAttributes attrs;
  bool any_field = false;
  for (const auto& s : statements) {
    if (s.kind != StatementKind::theorem && s.kind != StatementKind::axiom) continue;
    index.emplace(s.label, static_cast<NodeId>(attrs.labels.size()));
    attrs.labels.push_back(s.label);
    attrs.fields.push_back(s.field ? std::optional<FieldVector>(FieldVector{1u << *s.field}) : std::nullopt);
    any_field = any_field || s.field.has_value();
  }
  if (!any_field) attrs.fields.clear();
  GraphBuilder b(attrs.labels.size());
  for (const auto& s : statements) {
    if (s.kind != StatementKind::theorem) continue;
    const NodeId from = index.at(s.label);
    for (const auto& ref : s.proof_labels)
      if (auto it = index.find(ref); it != index.end()) b.add_edge(from, it->second);
  }
  // Proofs may only use earlier statements, so a cycle here is a parser bug.
  return Dag::finalize(std::move(b).build(std::move(attrs)).graph);
}

}  // namespace knet::mm
