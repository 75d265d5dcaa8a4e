#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <iterator>
#include <mutex>
#include <thread>
#include <vector>

namespace lyaplab {

/// Resolves a requested worker count; 0 means "all hardware threads".
inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) on up to `workers` threads. Callers write
/// results into per-index slots and reduce afterwards in index order, which
/// keeps output independent of the worker count. If several calls throw, the
/// exception of the lowest index is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = n;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Mean and standard error (sample std / sqrt(n)) in index order. The mean is
/// accumulated relative to the first element, so identical inputs give back
/// that value exactly and a zero standard error.
struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

template <class Range>
MeanStderr mean_stderr(const Range& xs) {
  MeanStderr out;
  const std::size_t n = std::size(xs);
  if (n == 0) return out;
  const double x0 = *std::begin(xs);
  double shift_sum = 0.0;
  for (double x : xs) shift_sum += x - x0;
  const double shift_mean = shift_sum / static_cast<double>(n);
  out.mean = x0 + shift_mean;
  if (n > 1) {
    double ss = 0.0;
    for (double x : xs) {
      const double d = (x - x0) - shift_mean;
      ss += d * d;
    }
    out.std_error = std::sqrt(ss / static_cast<double>(n - 1)) /
                    std::sqrt(static_cast<double>(n));
  }
  return out;
}

}  // namespace lyaplab
