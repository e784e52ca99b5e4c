#pragma once

#include <charconv>
#include <cstdio>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace knet {

// Publication date, either a full calendar date or a bare year.
struct Date {
  int year = 0;
  int month = 0;  // 0 when only the year is known
  int day = 0;

  bool year_only() const noexcept { return month == 0; }

  std::string str() const {
    if (year_only()) return std::to_string(year);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
  }
};

// Accepts "YYYY", "YYYY-MM" and "YYYY-MM-DD". Returns nullopt on anything else.
inline std::optional<Date> parse_date(std::string_view s) {
  auto num = [](std::string_view t, int& out) {
    if (t.empty()) return false;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc{} && ptr == t.data() + t.size();
  };
  Date d;
  if (s.size() == 4) {
    if (!num(s, d.year)) return std::nullopt;
    return d;
  }
  if (s.size() != 7 && s.size() != 10) return std::nullopt;
  if (s[4] != '-' || !num(s.substr(0, 4), d.year) || !num(s.substr(5, 2), d.month)) return std::nullopt;
  if (d.month < 1 || d.month > 12) return std::nullopt;
  if (s.size() == 10) {
    if (s[7] != '-' || !num(s.substr(8, 2), d.day) || d.day < 1 || d.day > 31) return std::nullopt;
  } else {
    d.day = 1;
  }
  return d;
}

// Ordering used by every date comparison in the toolkit. When either side is
// a bare year the comparison falls back to years only.
inline std::strong_ordering compare_dates(const Date& a, const Date& b) {
  if (a.year_only() || b.year_only()) return a.year <=> b.year;
  if (auto c = a.year <=> b.year; c != 0) return c;
  if (auto c = a.month <=> b.month; c != 0) return c;
  return a.day <=> b.day;
}

inline bool strictly_later(const Date& a, const Date& b) { return compare_dates(a, b) > 0; }

}  // namespace knet
