#include "spinelab/estimator.hpp"

#include <cmath>

#include "spinelab/simd/kernels.hpp"

namespace spinelab {

EstimatorReport summarize(std::span<const double> values, std::uint64_t seed, std::string label) {
  if (values.size() < 2) throw std::invalid_argument("summarize: at least two replicas are required");
  const double n = static_cast<double>(values.size());
  EstimatorReport r;
  r.mean = simd::sum(values) / n;
  const double var = simd::sum_sq_dev(values, r.mean) / (n - 1.0);
  r.std_error = std::sqrt(var / n);
  r.ci_low = r.mean - kZ95 * r.std_error;
  r.ci_high = r.mean + kZ95 * r.std_error;
  r.n_replicas = values.size();
  r.seed = seed;
  r.label = std::move(label);
  return r;
}

double combined_se(double a, double b) { return std::sqrt(a * a + b * b); }

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace spinelab
