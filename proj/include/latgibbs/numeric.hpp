#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace latgibbs {

// Neumaier-compensated accumulator. The result depends only on the order of
// the adds, never on how the caller schedules them across threads.
class compensated_sum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline std::atomic<int>& thread_count_ref() {
  static std::atomic<int> n{1};
  return n;
}

inline int thread_count() { return thread_count_ref().load(); }

inline void set_thread_count(int n) { thread_count_ref().store(n < 1 ? 1 : n); }

// Runs fn(b) for b in [0, blocks). The block decomposition is fixed by the
// caller, so per-block results are identical for any worker count; callers
// merge the blocks in index order to get bit-stable totals.
inline void parallel_blocks(int blocks, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_count(), blocks);
  if (workers <= 1) {
    for (int b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) fn(b);
    });
  }
  for (auto& t : pool) t.join();
}

// 17 significant digits: enough to round-trip any double, so reports built
// from equal values are byte-identical.
inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace latgibbs
