#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace locint {

inline int default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : int(n);
}

inline int resolve_threads(int requested) {
  return requested <= 0 ? default_threads() : requested;
}

// Static contiguous partition of [0, n). fn(begin, end, chunk_index) runs on
// its own thread per chunk; chunk_index is 0..threads-1 so callers can keep
// per-chunk accumulators and combine them in chunk order (deterministic for a
// fixed thread count).
inline void parallel_chunks(std::size_t n, int threads,
                            const std::function<void(std::size_t, std::size_t, int)>& fn) {
  threads = resolve_threads(threads);
  if (threads == 1 || n <= 1) {
    fn(0, n, 0);
    return;
  }
  const int k = std::min<std::size_t>(threads, n) > 0 ? int(std::min<std::size_t>(threads, n)) : 1;
  std::vector<std::thread> pool;
  pool.reserve(size_t(k));
  const std::size_t chunk = (n + size_t(k) - 1) / size_t(k);
  for (int c = 0; c < k; ++c) {
    const std::size_t b = size_t(c) * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e, c] { fn(b, e, c); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace locint
