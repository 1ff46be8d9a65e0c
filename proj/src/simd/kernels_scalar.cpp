#include "spinelab/simd/kernel_math.hpp"
#include "spinelab/simd/kernels.hpp"

namespace spinelab::simd {

namespace {

double sum_scalar(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] = acc[0] + x[i];
    acc[1] = acc[1] + x[i + 1];
    acc[2] = acc[2] + x[i + 2];
    acc[3] = acc[3] + x[i + 3];
  }
  double r = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) r = r + x[i];
  return r;
}

double sum_sq_dev_scalar(const double* x, std::size_t n, double center) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int j = 0; j < 4; ++j) {
      const double d = x[i + j] - center;
      acc[j] = acc[j] + d * d;
    }
  }
  double r = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) {
    const double d = x[i] - center;
    r = r + d * d;
  }
  return r;
}

void inverse_cdf_scalar(const KernelShape& s, const double* u, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = inverse_cdf_one(s, u[i]);
}

void kernel_cdf_scalar(const KernelShape& s, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = kernel_cdf_one(s, y[i]);
}

void recip_one_plus_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / (1.0 + x[i]);
}

void lyapunov_scalar(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + 1.0 / x[i];
}

void int_power_scalar(const double* x, double* out, std::size_t n, int power) {
  for (std::size_t i = 0; i < n; ++i) out[i] = int_power_one(x[i], power);
}

constexpr KernelTable kScalar{
    sum_scalar,         sum_sq_dev_scalar, inverse_cdf_scalar, kernel_cdf_scalar,
    recip_one_plus_scalar, lyapunov_scalar, int_power_scalar,
};

}  // namespace

namespace detail {
const KernelTable& scalar_table() { return kScalar; }
}  // namespace detail

}  // namespace spinelab::simd
