#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <mpfr.h>

#include "product.hpp"

namespace ginprod {

/// Evaluates fn(0..count-1) on a worker pool; results come back in index order.
///
/// Work is handed out through a shared counter, so the result does not depend
/// on the thread count. The first exception thrown by any task is rethrown
/// after all workers stop. Each worker releases MPFR's thread-local caches.
template <class Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) break;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
    mpfr_free_cache();
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// All realizations of an experiment, ordered by realization index.
inline std::vector<SpectralSample> run_ensemble(const ProductSpec& spec, unsigned threads = 0) {
  spec.validate();
  return parallel_map(static_cast<std::size_t>(spec.reps), threads,
                      [&](std::size_t i) { return simulate_realization(spec, i); });
}

}  // namespace ginprod
