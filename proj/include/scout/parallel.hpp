#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace scout {

/// Run fn(0..n-1) with at most `concurrency` worker threads. The callable
/// must not throw; per-task failures are the caller's responsibility.
template <typename Fn>
inline void parallel_for(std::size_t n, std::size_t concurrency, Fn&& fn) {
  if (n == 0) return;
  std::size_t workers = std::min(concurrency == 0 ? 1 : concurrency, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
  };
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
  for (auto& t : threads) t.join();
}

}  // namespace scout
