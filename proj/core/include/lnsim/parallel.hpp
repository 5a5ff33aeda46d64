#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lnsim {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Work items are
/// claimed dynamically, so callers must write results into per-index slots;
/// any merging is then done in index order and is schedule independent.
/// Stops claiming new items once `cancel` is set. The first exception thrown
/// by fn is rethrown after all threads joined.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn, const std::atomic<bool>* cancel = nullptr) {
  const auto threads = static_cast<std::size_t>(std::clamp<std::size_t>(workers < 1 ? 1 : workers, 1, count == 0 ? 1 : count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      if (cancel != nullptr && cancel->load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count, std::memory_order_relaxed);
        return;
      }
    }
  };
  if (threads == 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(body);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace lnsim
