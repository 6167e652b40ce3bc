#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace adrcm {

using ProgressHook = std::function<void(std::size_t done, std::size_t total)>;

// Runs body(i) for i in [0, count) on up to `threads` workers. Work items are
// claimed dynamically, but every result is written to its own slot by the
// caller's body, so output never depends on scheduling. The first failure
// stops further claims; among the items that threw, the exception of the
// lowest index is rethrown once all workers have returned.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body, const ProgressHook& progress = {}) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::size_t done = 0;
  std::size_t failed_index = count;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
        stop = true;
        return;
      }
      if (progress) {
        std::lock_guard lock(mu);
        progress(++done, count);
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace adrcm
