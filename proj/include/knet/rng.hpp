#pragma once

// Seeded randomness shared by every stochastic routine.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The standard distributions are not portable across library
// implementations, so draws go through the helpers below instead.
// Stream splitting: the i-th replicate/realization of a routine seeded with
// `base` uses an engine seeded with `base + i`.

#include <cstdint>
#include <random>
#include <vector>

namespace knet {

using Rng = std::mt19937_64;

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return base + index; }

// Uniform integer in [0, n). Lemire's multiply-shift with rejection.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  std::uint64_t x = rng();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = rng();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace knet
