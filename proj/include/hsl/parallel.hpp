#pragma once

// Minimal deterministic fork/join helpers. Work is distributed dynamically but
// results are always stored and merged by task index, so every reduction is
// independent of the thread count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hsl {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  threads = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count) return;
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// body(k) for k in [0, count); results returned in task order.
template <class R, class F>
std::vector<R> parallel_map(std::size_t count, unsigned threads, F&& body) {
  std::vector<R> out(count);
  parallel_for(count, threads, [&](std::size_t k) { out[k] = body(k); });
  return out;
}

/// Splits [0, n) into roughly `chunks` contiguous ranges.
inline std::vector<std::pair<std::size_t, std::size_t>> split_range(std::size_t n, std::size_t chunks) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = n * c / chunks;
    const std::size_t hi = n * (c + 1) / chunks;
    if (hi > lo) out.emplace_back(lo, hi);
  }
  return out;
}

}  // namespace hsl
