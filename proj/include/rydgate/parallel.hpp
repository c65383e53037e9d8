#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rydgate {

/// Worker cap: RYDGATE_MAX_WORKERS if set (>= 1), otherwise all hardware
/// threads.
inline unsigned max_workers() {
  if (const char* env = std::getenv("RYDGATE_MAX_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

namespace detail {
inline thread_local bool in_parallel_region = false;

struct RegionGuard {
  RegionGuard() { in_parallel_region = true; }
  ~RegionGuard() { in_parallel_region = false; }
};
}  // namespace detail

/// Runs body(i) for i in [0, count) across a shared-counter thread pool.
/// Every index is computed exactly once; callers that need deterministic
/// aggregation must write into index-addressed slots and reduce afterwards.
/// Nested calls from inside a worker run serially (no thread explosion);
/// each body's result is identical either way, so parallelism never changes
/// the output. The first exception thrown by any body is rethrown on the
/// caller thread.
inline void parallel_for(std::size_t count,
                         const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(max_workers(), count));
  if (workers <= 1 || detail::in_parallel_region) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&]() {
    detail::RegionGuard guard;
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rydgate
