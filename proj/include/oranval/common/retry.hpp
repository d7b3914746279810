#pragma once

#include <chrono>
#include <exception>
#include <thread>
#include <utility>

namespace oranval {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds backoff{0};
};

// Calls fn until it returns without throwing or the attempt budget is spent.
// The last exception is rethrown unchanged.
template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn) -> decltype(fn()) {
  const int attempts = policy.max_attempts < 1 ? 1 : policy.max_attempts;
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (...) {
      if (attempt >= attempts) throw;
      if (policy.backoff.count() > 0) std::this_thread::sleep_for(policy.backoff * attempt);
    }
  }
}

}  // namespace oranval
