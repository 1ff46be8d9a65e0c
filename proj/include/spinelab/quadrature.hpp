#pragma once

#include <cstddef>
#include <functional>

namespace spinelab {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tolerance = 1e-12;
  std::size_t max_intervals = 1'000'000;
};

/// Adaptive Simpson with Richardson correction. Intervals are refined until
/// the local error estimate is below the tolerance share of that interval;
/// refinement stops early (converged = false) once max_intervals is reached.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                                  const QuadratureOptions& options = {});

}  // namespace spinelab
