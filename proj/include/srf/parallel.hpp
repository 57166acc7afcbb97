#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace srf {

// Process indices [0, n) across at most `jobs` threads. Each index must touch
// only its own output slot; under that contract results are byte-identical
// for every worker count.
inline void parallel_for(std::size_t n, unsigned jobs,
                         const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  unsigned workers = jobs == 0 ? 1 : jobs;
  if (workers > n) workers = static_cast<unsigned>(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = static_cast<std::size_t>(w) * chunk;
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Worker count used when callers do not pass one; the CLI overrides it from
// --jobs. Outputs never depend on this value.
unsigned& default_jobs();

}
