#pragma once

// Deterministic Monte Carlo fan-out. Work is split into fixed-size chunks;
// chunk c draws from RngStream(seed, stream_base * 2^32 + c) and results are
// merged in chunk order, so output does not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "fracppk/rng.hpp"

namespace fracppk {

inline constexpr std::size_t kChunkSize = 4096;

/// Worker count: FRACPPK_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FRACPPK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

/// Evaluates draw(rng, i) for i in [0, n) and returns results in index order.
template <class T, class Draw>
std::vector<T> parallel_draws(std::size_t n, std::uint64_t seed, std::uint64_t stream_base, Draw&& draw) {
  std::vector<T> out(n);
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), std::max<std::size_t>(chunks, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        RngStream rng(seed, (stream_base << 32) + c);
        const std::size_t lo = c * kChunkSize, hi = std::min(n, lo + kChunkSize);
        for (std::size_t i = lo; i < hi; ++i) out[i] = draw(rng, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(chunks);
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace fracppk
