#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace completeness {

inline unsigned worker_count() {
  if (const char* env = std::getenv("COMPLETENESS_THREADS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return unsigned(n);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, n). Each index is an independent work unit; results
// must be written by index so the outcome is the same for any worker count.
namespace detail {
inline thread_local bool inside_parallel_for = false;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned workers = worker_count();
  // Nested calls run sequentially; the outer loop already owns the workers.
  if (workers <= 1 || n <= 1 || detail::inside_parallel_for) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = unsigned(n);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      detail::inside_parallel_for = true;
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace completeness
