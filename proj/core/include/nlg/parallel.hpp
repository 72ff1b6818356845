#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nlg {

// 0 means "use available hardware parallelism".
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(chunk) for every chunk in [0, chunks) on up to `workers` threads.
// Chunks are claimed in a fixed round-robin pattern; callers reduce the
// per-chunk results in chunk order, which keeps results independent of the
// worker count.
template <typename Body>
void parallel_chunks(std::int64_t chunks, int workers, Body&& body) {
  workers = static_cast<int>(std::min<std::int64_t>(resolve_workers(workers), chunks));
  if (workers <= 1) {
    for (std::int64_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::int64_t c = w; c < chunks; c += workers) body(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace nlg
