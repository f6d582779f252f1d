#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace thermobeam {

/// Worker count from an explicit request, else THERMOBEAM_WORKERS, else hardware concurrency.
std::size_t resolve_workers(std::size_t requested = 0);

/// Runs task(i) for i in [0, n) on up to `workers` threads. Tasks must write only to
/// their own slot; the first exception (lowest index) is rethrown after all finish.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task) {
  if (n == 0) return;
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace thermobeam
