#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace coexist {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/**
 * Splits [0, count) into fixed-size chunks, evaluates `body(begin, end)`
 * for each chunk on up to `threads` workers and merges the chunk results
 * in chunk order. Chunk boundaries depend only on `count` and
 * `chunk_size`, so the merged result is the same for any thread count.
 */
template <class Acc, class Body>
Acc deterministic_reduce(std::uint64_t count, std::uint64_t chunk_size, unsigned threads, Body&& body) {
  const std::uint64_t chunks = (count + chunk_size - 1) / chunk_size;
  std::vector<Acc> partial(chunks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        const std::uint64_t begin = c * chunk_size;
        partial[c] = body(begin, std::min(count, begin + chunk_size));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(chunks)));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  Acc total{};
  for (auto& p : partial) total.merge(p);
  return total;
}

}  // namespace coexist
