// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace agentft {

/// Runs `work(i)` for i in [0, n) on up to `concurrency` threads and hands
/// results to `sink(i, result)` strictly in index order, as soon as each
/// prefix completes. The first exception thrown by `work` or `sink` is
/// rethrown after all threads stop.
template <class Result, class Work, class Sink>
void ordered_parallel_for(std::size_t n, std::size_t concurrency, Work&& work, Sink&& sink) {
  std::vector<std::optional<Result>> slots(n);
  std::atomic<std::size_t> next{0};
  std::size_t flushed = 0;
  std::mutex mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard lock(mutex);
        if (failure) return;
      }
      try {
        Result result = work(i);
        std::lock_guard lock(mutex);
        slots[i].emplace(std::move(result));
        while (flushed < n && slots[flushed]) {
          sink(flushed, std::move(*slots[flushed]));
          slots[flushed].reset();
          ++flushed;
        }
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  std::size_t threads = std::clamp<std::size_t>(concurrency, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace agentft
