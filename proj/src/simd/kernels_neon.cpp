// AArch64 variant. Lanes 0-1 live in the first accumulator and lanes 2-3 in
// the second so the reduction order matches the scalar reference.
#include <arm_neon.h>

#include "spinelab/simd/kernel_math.hpp"
#include "spinelab/simd/kernels.hpp"

namespace spinelab::simd {

namespace {

double combine_lanes(float64x2_t lo_pair, float64x2_t hi_pair) {
  const double l0 = vgetq_lane_f64(lo_pair, 0), l1 = vgetq_lane_f64(lo_pair, 1);
  const double l2 = vgetq_lane_f64(hi_pair, 0), l3 = vgetq_lane_f64(hi_pair, 1);
  return (l0 + l1) + (l2 + l3);
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t a = vdupq_n_f64(0.0), b = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a = vaddq_f64(a, vld1q_f64(x + i));
    b = vaddq_f64(b, vld1q_f64(x + i + 2));
  }
  double r = combine_lanes(a, b);
  for (; i < n; ++i) r = r + x[i];
  return r;
}

double sum_sq_dev_neon(const double* x, std::size_t n, double center) {
  const float64x2_t c = vdupq_n_f64(center);
  float64x2_t a = vdupq_n_f64(0.0), b = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(x + i), c);
    const float64x2_t d1 = vsubq_f64(vld1q_f64(x + i + 2), c);
    a = vaddq_f64(a, vmulq_f64(d0, d0));
    b = vaddq_f64(b, vmulq_f64(d1, d1));
  }
  double r = combine_lanes(a, b);
  for (; i < n; ++i) {
    const double d = x[i] - center;
    r = r + d * d;
  }
  return r;
}

void inverse_cdf_neon(const KernelShape& s, const double* u, double* y, std::size_t n) {
  const float64x2_t base = vdupq_n_f64(s.base), denom = vdupq_n_f64(s.denom);
  const float64x2_t two_q = vdupq_n_f64(s.two_q), one = vdupq_n_f64(1.0);
  const float64x2_t lo = vdupq_n_f64(s.lo), hi = vdupq_n_f64(s.hi);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t k = vaddq_f64(base, vmulq_f64(vld1q_f64(u + i), denom));
    const float64x2_t root = vsqrtq_f64(vaddq_f64(one, vmulq_f64(two_q, k)));
    float64x2_t v = vdivq_f64(vaddq_f64(k, k), vaddq_f64(one, root));
    v = vminq_f64(vmaxq_f64(v, lo), hi);
    vst1q_f64(y + i, v);
  }
  for (; i < n; ++i) y[i] = inverse_cdf_one(s, u[i]);
}

void kernel_cdf_neon(const KernelShape& s, const double* y, double* out, std::size_t n) {
  const float64x2_t lo = vdupq_n_f64(s.lo), hi = vdupq_n_f64(s.hi);
  const float64x2_t half_q = vdupq_n_f64(s.half_q), denom = vdupq_n_f64(s.denom);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t yc = vminq_f64(vmaxq_f64(vld1q_f64(y + i), lo), hi);
    const float64x2_t dy = vsubq_f64(yc, lo);
    const float64x2_t num = vaddq_f64(dy, vmulq_f64(half_q, vmulq_f64(dy, vaddq_f64(yc, lo))));
    vst1q_f64(out + i, vdivq_f64(num, denom));
  }
  for (; i < n; ++i) out[i] = kernel_cdf_one(s, y[i]);
}

void recip_one_plus_neon(const double* x, double* out, std::size_t n) {
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vdivq_f64(one, vaddq_f64(one, vld1q_f64(x + i))));
  for (; i < n; ++i) out[i] = 1.0 / (1.0 + x[i]);
}

void lyapunov_neon(const double* x, double* out, std::size_t n) {
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    vst1q_f64(out + i, vaddq_f64(v, vdivq_f64(one, v)));
  }
  for (; i < n; ++i) out[i] = x[i] + 1.0 / x[i];
}

void int_power_neon(const double* x, double* out, std::size_t n, int power) {
  const int m = power < 0 ? -power : power;
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    float64x2_t r = one;
    for (int k = 0; k < m; ++k) r = vmulq_f64(r, v);
    if (power < 0) r = vdivq_f64(one, r);
    vst1q_f64(out + i, r);
  }
  for (; i < n; ++i) out[i] = int_power_one(x[i], power);
}

constexpr KernelTable kNeon{
    sum_neon,         sum_sq_dev_neon, inverse_cdf_neon, kernel_cdf_neon,
    recip_one_plus_neon, lyapunov_neon, int_power_neon,
};

}  // namespace

namespace detail {
const KernelTable* neon_table() { return &kNeon; }
}  // namespace detail

}  // namespace spinelab::simd
