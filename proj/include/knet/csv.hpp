#pragma once

// Minimal RFC 4180 reader and writer helpers.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "knet/error.hpp"

namespace knet::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line = 0;  // line on which the record starts
};

class Reader {
public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of input. Blank lines are skipped.
  std::optional<Row> next() {
    for (;;) {
      if (in_.peek() == EOF) return std::nullopt;
      Row row;
      row.line = line_;
      std::string field;
      bool quoted = false;
      bool was_quoted = false;
      for (;;) {
        int c = in_.get();
        if (quoted) {
          if (c == EOF) throw ParseError(row.line, "unterminated quoted field");
          if (c == '"') {
            if (in_.peek() == '"') {
              field.push_back('"');
              in_.get();
            } else {
              quoted = false;
            }
          } else {
            if (c == '\n') ++line_;
            field.push_back(static_cast<char>(c));
          }
          continue;
        }
        if (c == '"') {
          if (!field.empty() || was_quoted) throw ParseError(line_, "stray quote in field");
          quoted = was_quoted = true;
        } else if (c == ',') {
          row.fields.push_back(std::move(field));
          field.clear();
          was_quoted = false;
        } else if (c == '\n' || c == EOF) {
          if (c == '\n') ++line_;
          row.fields.push_back(std::move(field));
          break;
        } else if (c == '\r') {
          if (in_.peek() != '\n') throw ParseError(line_, "bare carriage return");
        } else {
          if (was_quoted) throw ParseError(line_, "text after closing quote");
          field.push_back(static_cast<char>(c));
        }
      }
      if (row.fields.size() == 1 && row.fields[0].empty()) continue;
      return row;
    }
  }

private:
  std::istream& in_;
  std::size_t line_ = 1;
};

inline std::string escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace knet::csv
