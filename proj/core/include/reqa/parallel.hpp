#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace reqa {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

inline size_t chunk_count(size_t n, size_t grain) {
  return grain ? (n + grain - 1) / grain : 0;
}

/// Runs body(chunk_index, begin, end) over fixed-size chunks of [0, n).
/// The chunk layout depends only on `grain`, never on the thread count, so
/// any reduction keyed by chunk index is reproducible at any parallelism.
/// Bodies must write to disjoint state; the first thrown exception wins.
template <typename Body>
void parallel_chunks(size_t n, size_t grain, unsigned threads, Body&& body) {
  if (n == 0) return;
  if (grain == 0) grain = 1;
  const size_t chunks = chunk_count(n, grain);
  threads = resolve_threads(threads);
  if (threads <= 1 || chunks <= 1) {
    for (size_t c = 0; c < chunks; ++c) {
      size_t begin = c * grain;
      size_t end = begin + grain < n ? begin + grain : n;
      body(c, begin, end);
    }
    return;
  }

  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  size_t error_chunk = SIZE_MAX;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunks) break;
      size_t begin = c * grain;
      size_t end = begin + grain < n ? begin + grain : n;
      try {
        body(c, begin, end);
      } catch (...) {
        // Keep the lowest-index failure among those in flight so error
        // messages stay (near-)stable across thread counts.
        std::lock_guard<std::mutex> lock(error_mutex);
        if (c < error_chunk) {
          error_chunk = c;
          error = std::current_exception();
        }
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };

  std::vector<std::thread> pool;
  size_t workers = threads < chunks ? threads : chunks;
  pool.reserve(workers);
  for (size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace reqa
