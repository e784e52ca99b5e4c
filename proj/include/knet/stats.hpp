#pragma once

// Correlations with significance, bootstrap resampling, Q-Q points.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "knet/error.hpp"
#include "knet/rng.hpp"

namespace knet::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw Error("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Sample standard deviation (n - 1 denominator).
inline double sample_stddev(std::span<const double> x) {
  if (x.size() < 2) throw Error("standard deviation needs at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

enum class CorrelationKind { pearson, spearman, kendall };

inline std::string_view to_string(CorrelationKind k) {
  switch (k) {
    case CorrelationKind::pearson: return "pearson";
    case CorrelationKind::spearman: return "spearman";
    case CorrelationKind::kendall: return "kendall";
  }
  return "pearson";
}

struct CorrelationResult {
  std::optional<double> coefficient;  // absent when a variable has zero variance
  std::optional<double> p_value;      // two-sided
  std::size_t n = 0;
  CorrelationKind kind = CorrelationKind::pearson;
};

// Average (1-based) ranks; ties share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
    i = j + 1;
  }
  return r;
}

inline std::optional<double> pearson_coefficient(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

namespace detail {

// Number of inversions in v (merge sort), used for Kendall's tau.
inline std::uint64_t count_swaps(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = count_swaps(v, buf, lo, mid) + count_swaps(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += mid - i;
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

// Sum of t(t-1)/2 over runs of equal values in a sorted range.
template <class It, class Eq>
std::uint64_t tied_pairs(It first, It last, Eq eq) {
  std::uint64_t total = 0;
  for (It i = first; i != last;) {
    It j = i;
    std::uint64_t t = 0;
    while (j != last && eq(*i, *j)) {
      ++j;
      ++t;
    }
    total += t * (t - 1) / 2;
    i = j;
  }
  return total;
}

}  // namespace detail

// Kendall's tau-b in O(n log n) (Knight's algorithm).
inline std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<std::pair<double, double>> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = {x[i], y[i]};
  std::sort(p.begin(), p.end());
  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t n1 = detail::tied_pairs(p.begin(), p.end(), [](auto& a, auto& b) { return a.first == b.first; });
  const std::uint64_t n3 = detail::tied_pairs(p.begin(), p.end(), [](auto& a, auto& b) { return a == b; });
  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = p[i].second;
  const std::uint64_t swaps = detail::count_swaps(ys, buf, 0, n);
  const std::uint64_t n2 = detail::tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });
  const double denom = std::sqrt(static_cast<double>(n0 - n1)) * std::sqrt(static_cast<double>(n0 - n2));
  if (denom == 0.0) return std::nullopt;
  const double numer = static_cast<double>(n0) - static_cast<double>(n1) - static_cast<double>(n2) +
                       static_cast<double>(n3) - 2.0 * static_cast<double>(swaps);
  return std::clamp(numer / denom, -1.0, 1.0);
}

inline double t_test_p_value(double r, std::size_t n) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = r * std::sqrt(df / (1.0 - r * r));
  boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

// Pearson product-moment, Spearman (Pearson on average ranks) or Kendall tau-b.
// p-values: t transform for Pearson/Spearman, normal approximation with the
// untied variance 2(2n+5)/(9n(n-1)) for Kendall.
inline CorrelationResult correlate(std::span<const double> x, std::span<const double> y, CorrelationKind kind) {
  if (x.size() != y.size()) throw Error("correlate: samples differ in length");
  if (x.size() < 3) throw Error("correlate: need at least three observations");
  CorrelationResult res;
  res.n = x.size();
  res.kind = kind;
  switch (kind) {
    case CorrelationKind::pearson: res.coefficient = pearson_coefficient(x, y); break;
    case CorrelationKind::spearman: {
      auto rx = average_ranks(x), ry = average_ranks(y);
      res.coefficient = pearson_coefficient(rx, ry);
      break;
    }
    case CorrelationKind::kendall: res.coefficient = kendall_tau_b(x, y); break;
  }
  if (!res.coefficient) return res;
  if (kind == CorrelationKind::kendall) {
    const double n = static_cast<double>(res.n);
    const double z = 3.0 * *res.coefficient * std::sqrt(n * (n - 1.0)) / std::sqrt(2.0 * (2.0 * n + 5.0));
    boost::math::normal_distribution<double> norm;
    res.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(norm, std::abs(z))));
  } else {
    res.p_value = t_test_p_value(*res.coefficient, res.n);
  }
  return res;
}

struct BootstrapDistribution {
  std::vector<double> replicate_means;
  std::string group_label;
  std::uint64_t base_seed = 0;
};

// Replicate r draws n values with replacement using an engine seeded with
// derive_seed(seed, r).
inline BootstrapDistribution bootstrap_means(std::span<const double> values, std::size_t replicates,
                                             std::uint64_t seed, std::string group_label = {}) {
  if (values.empty()) throw Error("bootstrap of an empty sample");
  BootstrapDistribution out{{}, std::move(group_label), seed};
  out.replicate_means.reserve(replicates);
  const std::size_t n = values.size();
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng(derive_seed(seed, r));
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += values[uniform_index(rng, n)];
    out.replicate_means.push_back(sum / static_cast<double>(n));
  }
  return out;
}

struct BootstrapTest {
  double t_statistic = 0.0;
  double p_value = 1.0;
  BootstrapDistribution a;
  BootstrapDistribution b;
  static constexpr std::string_view method = "bootstrap-t, shift to pooled mean";
};

// Two-sample bootstrap t-test.
//   t  = (mean a - mean b) / sqrt(se_a^2 + se_b^2), se = stddev of replicate means
//   p  = fraction of shifted resamples (both samples recentred on the pooled
//        mean) whose |t*| >= |t|, with t* using plug-in standard errors.
inline BootstrapTest bootstrap_two_sample_test(std::span<const double> a, std::span<const double> b,
                                               std::size_t replicates, std::uint64_t seed) {
  if (a.empty() || b.empty()) throw Error("bootstrap test needs two nonempty samples");
  BootstrapTest out;
  out.a = bootstrap_means(a, replicates, seed, "a");
  out.b = bootstrap_means(b, replicates, seed + replicates, "b");
  const double ma = mean(a), mb = mean(b);
  auto spread = [](const std::vector<double>& v) { return v.size() < 2 ? 0.0 : sample_stddev(v); };
  const double se = std::hypot(spread(out.a.replicate_means), spread(out.b.replicate_means));
  if (se == 0.0) {
    out.t_statistic = ma == mb ? 0.0 : std::copysign(INFINITY, ma - mb);
    out.p_value = ma == mb ? 1.0 : 0.0;
    return out;
  }
  out.t_statistic = (ma - mb) / se;

  const double pooled = (ma * static_cast<double>(a.size()) + mb * static_cast<double>(b.size())) /
                        static_cast<double>(a.size() + b.size());
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  for (double& v : sa) v += pooled - ma;
  for (double& v : sb) v += pooled - mb;

  auto resample_stats = [](const std::vector<double>& src, Rng& rng) {
    const std::size_t n = src.size();
    double sum = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double v = src[uniform_index(rng, n)];
      sum += v;
      sq += v * v;
    }
    const double m = sum / static_cast<double>(n);
    const double var = n > 1 ? std::max(0.0, (sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1)) : 0.0;
    return std::pair{m, var / static_cast<double>(n)};
  };
  std::size_t extreme = 0;
  const std::uint64_t null_seed = seed + 2 * replicates;
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng(derive_seed(null_seed, r));
    auto [m1, v1] = resample_stats(sa, rng);
    auto [m2, v2] = resample_stats(sb, rng);
    const double s = std::sqrt(v1 + v2);
    const double t = s == 0.0 ? (m1 == m2 ? 0.0 : INFINITY) : (m1 - m2) / s;
    if (std::abs(t) >= std::abs(out.t_statistic)) ++extreme;
  }
  out.p_value = static_cast<double>(extreme) / static_cast<double>(replicates);
  return out;
}

// Empirical quantile with linear interpolation between order statistics.
inline double quantile_sorted(std::span<const double> sorted, double level) {
  const double h = level * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Paired quantiles at levels (i - 0.5) / count, i = 1..count.
inline std::vector<std::pair<double, double>> qq_points(std::span<const double> a, std::span<const double> b,
                                                         std::size_t count = 100) {
  if (a.empty() || b.empty()) throw Error("qq_points needs two nonempty samples");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) {
    const double level = (static_cast<double>(i) - 0.5) / static_cast<double>(count);
    out.emplace_back(quantile_sorted(sa, level), quantile_sorted(sb, level));
  }
  return out;
}

struct Keyed {
  std::size_t node = 0;
  double value = 0.0;
};

struct TopBottom {
  std::vector<Keyed> top;
  std::vector<Keyed> bottom;
};

// Sorts by value descending (node id ascending on ties) and returns the first
// and last ceil(fraction * n) items.
inline TopBottom top_bottom_split(std::vector<Keyed> values, double fraction = 0.2) {
  if (!(fraction > 0.0 && fraction <= 0.5)) throw Error("split fraction must lie in (0, 0.5]");
  if (values.size() < 2) throw Error("split needs at least two items");
  std::sort(values.begin(), values.end(), [](const Keyed& x, const Keyed& y) {
    return x.value != y.value ? x.value > y.value : x.node < y.node;
  });
  const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(values.size()) - 1e-9));
  TopBottom out;
  out.top.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k));
  out.bottom.assign(values.end() - static_cast<std::ptrdiff_t>(k), values.end());
  return out;
}

}  // namespace knet::stats
