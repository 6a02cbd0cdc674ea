// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include "agentft/error.hpp"
#include "agentft/http.hpp"

namespace agentft {

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{32000};
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };

  std::chrono::milliseconds backoff_before(int attempt) const {
    double delay = static_cast<double>(initial_backoff.count());
    for (int i = 1; i < attempt; ++i) delay *= multiplier;
    return std::chrono::milliseconds(
        static_cast<long long>(std::min(delay, static_cast<double>(max_backoff.count()))));
  }
};

inline bool is_retryable_status(int status) noexcept {
  return status == 0 || status == 408 || status == 409 || status == 429 || status >= 500;
}

/// Token bucket shared by every client in a process. `acquire` blocks until a
/// token is available; tokens refill continuously at `rate_per_second`.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  RateLimiter(double rate_per_second, double burst)
      : rate_(rate_per_second), capacity_(std::max(1.0, burst)), tokens_(capacity_), last_(Clock::now()) {
    if (rate_per_second <= 0) throw ConfigError("rate limiter: rate must be positive");
  }

  void acquire() {
    std::unique_lock lock(mutex_);
    for (;;) {
      refill(Clock::now());
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
      lock.unlock();
      std::this_thread::sleep_for(wait);
      lock.lock();
    }
  }

  double rate() const noexcept { return rate_; }
  double capacity() const noexcept { return capacity_; }

 private:
  void refill(Clock::time_point now) {
    std::chrono::duration<double> elapsed = now - last_;
    tokens_ = std::min(capacity_, tokens_ + elapsed.count() * rate_);
    last_ = now;
  }

  double rate_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mutex_;
};

/// Runs `attempt` until it yields a 2xx response. Retryable statuses and
/// transport failures back off exponentially; anything else, or exhausting
/// the attempts, throws TransportError carrying the last status and body.
template <class Attempt>
HttpResponse send_with_retry(const RetryPolicy& policy, RateLimiter* limiter, const std::string& what,
                             Attempt&& attempt) {
  int last_status = 0;
  std::string last_body;
  for (int i = 1; i <= std::max(1, policy.max_attempts); ++i) {
    if (i > 1) policy.sleep(policy.backoff_before(i - 1));
    if (limiter) limiter->acquire();
    try {
      HttpResponse response = attempt();
      if (response.status >= 200 && response.status < 300) return response;
      last_status = response.status;
      last_body = std::move(response.body);
      if (!is_retryable_status(last_status)) {
        throw TransportError(last_status, last_body,
                             what + ": HTTP " + std::to_string(last_status) + ": " + last_body.substr(0, 200));
      }
    } catch (const TransportError& e) {
      if (e.status() != 0 && !is_retryable_status(e.status())) throw;
      last_status = e.status();
      last_body = e.body().empty() ? e.what() : e.body();
    }
  }
  throw TransportError(last_status, last_body,
                       what + ": gave up after " + std::to_string(policy.max_attempts) + " attempts (last status " +
                           std::to_string(last_status) + ")");
}

}  // namespace agentft
