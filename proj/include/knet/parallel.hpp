#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace knet {

// Worker count: KNET_THREADS when set, otherwise the hardware concurrency.
inline unsigned default_threads() {
  if (const char* env = std::getenv("KNET_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Number of workers parallel_for will actually start.
inline unsigned worker_count(std::size_t n, unsigned threads, std::size_t chunk) {
  return std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>((n + chunk - 1) / chunk)));
}

// Calls fn(i, worker) for every i in [0, n), worker < worker_count(...). Work
// is handed out in chunks; callers must write results to per-index slots so
// the outcome does not depend on scheduling.
template <class Fn>
void parallel_for_workers(std::size_t n, unsigned threads, Fn&& fn, std::size_t chunk = 64) {
  threads = worker_count(n, threads, chunk);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i, 0u);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= n) return;
        const std::size_t end = std::min(n, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) fn(i, t);
      }
    });
  for (auto& th : pool) th.join();
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn, std::size_t chunk = 64) {
  parallel_for_workers(n, threads, [&](std::size_t i, unsigned) { fn(i); }, chunk);
}

}  // namespace knet
