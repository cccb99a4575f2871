#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace sparkspread {

// Worker cap: SPARKSPREAD_THREADS if set (>= 1), else hardware concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("SPARKSPREAD_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

// Partitions [0, n) into fixed-size chunks and runs fn(chunk_index, begin,
// end) across workers. Chunk boundaries depend only on n and chunk_size, so
// reductions keyed by chunk_index are invariant under the worker count.
inline void parallel_chunks(long n, long chunk_size,
                            const std::function<void(long, long, long)>& fn) {
  if (n <= 0) return;
  const long n_chunks = (n + chunk_size - 1) / chunk_size;
  const int workers = std::min<long>(worker_count(), n_chunks);
  if (workers <= 1) {
    for (long c = 0; c < n_chunks; ++c) {
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
    return;
  }
  std::atomic<long> next{0};
  auto body = [&] {
    for (;;) {
      const long c = next.fetch_add(1);
      if (c >= n_chunks) return;
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
}

}  // namespace sparkspread
