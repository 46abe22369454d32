#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace pinchwave {

/// Worker count: `requested` if positive, else hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Reads PINCHWAVE_THREADS (0 or unset means automatic).
inline unsigned threads_from_env() {
  const char* v = std::getenv("PINCHWAVE_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  try {
    const long n = std::stol(v);
    return n > 0 ? static_cast<unsigned>(n) : 0u;
  } catch (const std::exception&) {
    return 0;
  }
}

/// Calls body(i) for every i in [0, count) on up to `threads` workers.
/// Indices are handed out dynamically; callers write results by index so the
/// outcome does not depend on scheduling. The first exception is rethrown.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace pinchwave
