#pragma once

// Scalar element formulas shared by the reference kernels and the one-off
// model functions. Vector variants mirror these operation by operation.

#include <algorithm>
#include <cmath>

#include "spinelab/simd/kernels.hpp"

namespace spinelab::simd {

// Positive root of half_q y^2 + y - k = 0 written as 2k / (1 + sqrt(1 + 2 q k)),
// which stays accurate as q -> 0.
inline double inverse_cdf_one(const KernelShape& s, double u) {
  const double k = s.base + u * s.denom;
  const double root = std::sqrt(1.0 + s.two_q * k);
  const double y = (k + k) / (1.0 + root);
  return std::min(std::max(y, s.lo), s.hi);
}

inline double kernel_cdf_one(const KernelShape& s, double y) {
  const double yc = std::min(std::max(y, s.lo), s.hi);
  const double dy = yc - s.lo;
  const double num = dy + s.half_q * (dy * (yc + s.lo));
  return num / s.denom;
}

inline double int_power_one(double x, int power) {
  const int m = power < 0 ? -power : power;
  double r = 1.0;
  for (int i = 0; i < m; ++i) r = r * x;
  return power < 0 ? 1.0 / r : r;
}

}  // namespace spinelab::simd
