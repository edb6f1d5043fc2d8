#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace graphonlab {

inline int default_workers() {
  if (const char* env = std::getenv("GRAPHONLAB_WORKERS")) {
    int w = std::atoi(env);
    if (w >= 1) return w;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

// Runs fn(chunk_index) for chunk_index in [0, chunks). Results must be written
// into per-chunk slots by the caller so the reduction order is fixed and the
// outcome does not depend on thread scheduling.
inline void parallel_chunks(int chunks, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || chunks <= 1) {
    for (int c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int c = next.fetch_add(1);
      if (c >= chunks) return;
      fn(c);
    }
  };
  std::vector<std::thread> pool;
  int n = std::min(workers, chunks);
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

// Compensated (Kahan) accumulator for long double-precision sums.
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;

  void add(double x) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace graphonlab
