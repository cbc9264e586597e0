// Copyright 2026 the shiftkernel authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace shiftkernel::detail {

// Global worker count for the embarrassingly parallel loops (Gram rows,
// projection angles). Output slots are disjoint, so results do not depend
// on the value.
inline int& thread_count() {
  static int n = 1;
  return n;
}

inline void set_thread_count(int n) { thread_count() = std::max(1, n); }

template <class F>
void parallel_for(int begin, int end, F&& body) {
  const int total = end - begin;
  const int workers = std::min(thread_count(), std::max(1, total));
  if (workers <= 1 || total <= 1) {
    for (int i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const int chunk = (total + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = begin + w * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace shiftkernel::detail
