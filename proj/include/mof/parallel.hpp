#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mof {

/// Runs fn(i) for i in [0, count). With num_threads <= 1 the loop is serial;
/// otherwise work items are handed out in index order from a shared counter.
/// Callers must make work items independent (distinct output slots), so the
/// result never depends on scheduling.
inline void parallel_for(std::size_t count, int num_threads,
                         const std::function<void(std::size_t)>& fn) {
  if (num_threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(num_threads), count);
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr error;
  auto body = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= count || error) return;
        i = next++;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mof
