#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace agentlab {

// Runs fn(i) for i in [0, n). Cells must be independent; results should be
// written into per-index slots so the schedule cannot affect output.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t min_grain = 1024) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw <= 1 || n < 2 * min_grain) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t workers = std::min<std::size_t>(hw, (n + min_grain - 1) / min_grain);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace agentlab
