#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace sjl {

// Runs fn(i) for i in [0, n). Work items must be independent and write to
// disjoint state; under that contract the result cannot depend on the thread
// count, which is what lets callers expose a threads knob without giving up
// reproducibility.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      // Contiguous blocks; block w covers [lo, hi).
      const std::size_t lo = n * w / workers;
      const std::size_t hi = n * (w + 1) / workers;
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace sjl
