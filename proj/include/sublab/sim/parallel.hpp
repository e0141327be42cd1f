#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace sublab::sim {

/// Worker count: explicit request, else SUBLAB_WORKERS, else hardware.
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SUBLAB_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Run fn(begin, end, worker_id) over contiguous chunks of [0, n). Results
/// must be written to per-item slots so the outcome is schedule-independent.
inline void parallel_chunks(std::int64_t n, int workers,
                            const std::function<void(std::int64_t, std::int64_t, int)>& fn) {
  workers = resolve_workers(workers);
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    fn(0, n, 0);
    return;
  }
  const int used = static_cast<int>(std::min<std::int64_t>(workers, n));
  std::vector<std::thread> pool;
  pool.reserve(used);
  const std::int64_t chunk = (n + used - 1) / used;
  for (int w = 0; w < used; ++w) {
    const std::int64_t b = w * chunk;
    const std::int64_t e = std::min<std::int64_t>(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e, w] { fn(b, e, w); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sublab::sim
