#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace beamsim {

/// Runs fn(i) for i in [0, n). Work is split into contiguous index blocks so
/// each output slot is written by exactly one thread; results are therefore
/// identical to the serial order regardless of thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned n_threads = 0) {
  if (n_threads == 0) n_threads = std::thread::hardware_concurrency();
  if (n_threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (n_threads > n) n_threads = static_cast<unsigned>(n);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  const std::size_t chunk = (n + n_threads - 1) / n_threads;
  for (unsigned t = 0; t < n_threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace beamsim
