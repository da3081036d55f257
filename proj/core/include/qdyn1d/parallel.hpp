#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qdyn1d {

/// Worker count: explicit request, else QDYN1D_THREADS, else hardware.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QDYN1D_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Run fn(i) for i in [0, count) on up to `threads` workers. Work items must
/// not touch shared mutable state; exceptions escape from the calling thread
/// only (worker exceptions terminate, so fn must catch its own).
template <typename Fn>
void parallel_for(std::size_t count, const Fn& fn, int threads = 0) {
  const int n_workers = std::min<std::size_t>(resolve_threads(threads), count);
  if (n_workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace qdyn1d
