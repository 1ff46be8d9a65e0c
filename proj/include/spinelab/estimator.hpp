#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace spinelab {

/// Normal 97.5% quantile used for every 95% interval in the toolkit.
inline constexpr double kZ95 = 1.959963984540054;

struct EstimatorReport {
  double mean = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t n_replicas = 0;
  std::uint64_t seed = 0;
  std::string label;
};

/// Mean, standard error (sample deviation over sqrt(n)) and normal-theory
/// 95% interval. Two-pass through the SIMD reductions, so the result is the
/// same for any worker count that produced `values`. Requires n >= 2.
EstimatorReport summarize(std::span<const double> values, std::uint64_t seed, std::string label);

/// sqrt(a^2 + b^2): standard error of a difference of independent estimates.
double combined_se(double a, double b);

unsigned resolve_workers(unsigned requested);

/// Evaluates fn(i) for i in [0, n) on a bounded pool of threads and returns
/// the results indexed by i. Each replica's randomness must depend only on i.
template <class R, class Fn>
std::vector<R> run_replicas(std::size_t n, unsigned workers, Fn&& fn) {
  std::vector<R> out(n);
  const unsigned pool = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
  if (pool <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (unsigned w = 0; w < pool; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += pool) out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace spinelab
