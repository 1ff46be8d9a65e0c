// Compiled with -mavx2 (and without -mfma); only reached after a runtime
// CPU check.
#include <immintrin.h>

#include "spinelab/simd/kernel_math.hpp"
#include "spinelab/simd/kernels.hpp"

namespace spinelab::simd {

namespace {

double combine_lanes(__m256d acc) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = combine_lanes(acc);
  for (; i < n; ++i) r = r + x[i];
  return r;
}

double sum_sq_dev_avx2(const double* x, std::size_t n, double center) {
  const __m256d c = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), c);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double r = combine_lanes(acc);
  for (; i < n; ++i) {
    const double d = x[i] - center;
    r = r + d * d;
  }
  return r;
}

void inverse_cdf_avx2(const KernelShape& s, const double* u, double* y, std::size_t n) {
  const __m256d base = _mm256_set1_pd(s.base);
  const __m256d denom = _mm256_set1_pd(s.denom);
  const __m256d two_q = _mm256_set1_pd(s.two_q);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d lo = _mm256_set1_pd(s.lo);
  const __m256d hi = _mm256_set1_pd(s.hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d k = _mm256_add_pd(base, _mm256_mul_pd(_mm256_loadu_pd(u + i), denom));
    const __m256d root = _mm256_sqrt_pd(_mm256_add_pd(one, _mm256_mul_pd(two_q, k)));
    __m256d v = _mm256_div_pd(_mm256_add_pd(k, k), _mm256_add_pd(one, root));
    v = _mm256_min_pd(_mm256_max_pd(v, lo), hi);
    _mm256_storeu_pd(y + i, v);
  }
  for (; i < n; ++i) y[i] = inverse_cdf_one(s, u[i]);
}

void kernel_cdf_avx2(const KernelShape& s, const double* y, double* out, std::size_t n) {
  const __m256d lo = _mm256_set1_pd(s.lo);
  const __m256d hi = _mm256_set1_pd(s.hi);
  const __m256d half_q = _mm256_set1_pd(s.half_q);
  const __m256d denom = _mm256_set1_pd(s.denom);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yc = _mm256_min_pd(_mm256_max_pd(_mm256_loadu_pd(y + i), lo), hi);
    const __m256d dy = _mm256_sub_pd(yc, lo);
    const __m256d num = _mm256_add_pd(dy, _mm256_mul_pd(half_q, _mm256_mul_pd(dy, _mm256_add_pd(yc, lo))));
    _mm256_storeu_pd(out + i, _mm256_div_pd(num, denom));
  }
  for (; i < n; ++i) out[i] = kernel_cdf_one(s, y[i]);
}

void recip_one_plus_avx2(const double* x, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_div_pd(one, _mm256_add_pd(one, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) out[i] = 1.0 / (1.0 + x[i]);
}

void lyapunov_avx2(const double* x, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(out + i, _mm256_add_pd(v, _mm256_div_pd(one, v)));
  }
  for (; i < n; ++i) out[i] = x[i] + 1.0 / x[i];
}

void int_power_avx2(const double* x, double* out, std::size_t n, int power) {
  const int m = power < 0 ? -power : power;
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    __m256d r = one;
    for (int k = 0; k < m; ++k) r = _mm256_mul_pd(r, v);
    if (power < 0) r = _mm256_div_pd(one, r);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = int_power_one(x[i], power);
}

constexpr KernelTable kAvx2{
    sum_avx2,         sum_sq_dev_avx2, inverse_cdf_avx2, kernel_cdf_avx2,
    recip_one_plus_avx2, lyapunov_avx2, int_power_avx2,
};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &kAvx2; }
}  // namespace detail

}  // namespace spinelab::simd
