#pragma once

#include <cstddef>
#include <thread>
#include <utility>
#include <vector>

namespace divsel {

// Process-wide worker-thread cap for data-parallel loops. Default 1.
int max_threads();
void set_max_threads(int n);

// Runs f(i) for i in [0, n). Each call must touch only state owned by slot i;
// under that contract results are bitwise identical for any thread count.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const int threads = max_threads();
  if (threads <= 1 || n < 4096) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(threads, n);
  const std::size_t chunk = (n + nt - 1) / nt;
  std::vector<std::jthread> workers;
  workers.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(begin + chunk, n);
    if (begin >= end) break;
    workers.emplace_back([begin, end, &f] {
      for (std::size_t i = begin; i < end; ++i) f(i);
    });
  }
}

}  // namespace divsel
