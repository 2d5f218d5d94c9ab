#pragma once

// Deterministic fan-out of independent tasks over worker threads.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace homokinetics {

/// Worker count: HOMOKINETICS_THREADS if set, else the hardware concurrency.
inline int worker_count()
{
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HOMOKINETICS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = cap;
  }
  return std::max(n, 1);
}

/// Calls task(i) for i in [0, n). Each task must only write to its own
/// slot; the first exception thrown by any task is rethrown.
template <typename Task>
void parallel_for(int n, Task&& task)
{
  const int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace homokinetics
