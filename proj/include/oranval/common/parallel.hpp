#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace oranval {

// Runs fn(i) for every i in [0, count) on at most max_workers threads.
// Once any call throws, no new items are started; the first exception is
// rethrown after all workers have joined. Returns the number of items started.
template <typename Fn>
std::size_t bounded_parallel_for(std::size_t count, std::size_t max_workers, Fn&& fn) {
  if (count == 0) return 0;
  const std::size_t workers = std::clamp<std::size_t>(max_workers, 1, count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (first_error) std::rethrow_exception(first_error);
  return std::min(next.load(), count);
}

}  // namespace oranval
