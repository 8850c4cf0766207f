#pragma once

// Fixed-partition parallel loops. Work is split into index-ordered tasks and
// every task writes only its own slot, so results never depend on how many
// workers ran them.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kloos {

/// Environment variable that sets the worker count.
inline constexpr const char* kWorkersEnv = "KLOOS_WORKERS";

namespace detail {
inline std::atomic<int>& worker_override() {
  static std::atomic<int> value{0};
  return value;
}
}  // namespace detail

/// Overrides the worker count for this process; 0 restores the default.
inline void set_worker_count(int n) { detail::worker_override().store(std::max(0, n)); }

inline int worker_count() {
  if (int n = detail::worker_override().load(); n > 0) return n;
  if (const char* env = std::getenv(kWorkersEnv)) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Calls body(i) for every i in [0, count). Tasks are claimed dynamically but
/// each index is processed exactly once; exceptions are rethrown (first one).
template <typename Body>
void parallel_for(std::size_t count, Body&& body, int workers = 0) {
  if (workers <= 0) workers = worker_count();
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace kloos
