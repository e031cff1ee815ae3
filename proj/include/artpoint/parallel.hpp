#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace artpoint {

// Runs fn(i) for i in [0, n). Work items must be independent and keyed by
// index, so the worker count and chunk size never change the outcome; chunk
// only sets how many consecutive items a worker claims at once (throughput
// batching). The first exception, if any, is rethrown on the calling thread.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& fn,
                         std::size_t chunk = 1) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (chunk == 0) chunk = 1;
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (;;) {
          const std::size_t start = next.fetch_add(chunk);
          if (start >= n) return;
          const std::size_t stop = std::min(n, start + chunk);
          for (std::size_t i = start; i < stop; ++i) fn(i);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace artpoint
