#pragma once

// Data-parallel inner loops of the toolkit. Every kernel has a scalar
// reference and vector variants (AVX2 on x86-64, NEON on AArch64). The
// variants evaluate the same operations in the same order: reductions keep
// four interleaved partial sums combined as (l0 + l1) + (l2 + l3) followed by
// the tail, and no fused multiply-add is used anywhere. Outputs are therefore
// bit-identical across variants, which keeps Monte Carlo runs reproducible
// regardless of the host CPU.

#include <cstddef>
#include <span>

namespace spinelab::simd {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);
bool isa_supported(Isa isa);

/// ISA used by the dispatching entry points. Chosen once from the CPU
/// features; the SPINELAB_SIMD environment variable (scalar|avx2|neon)
/// overrides the choice when the requested ISA is available.
Isa active_isa();

/// Overrides the dispatch choice; throws std::invalid_argument if the ISA is
/// not supported on this machine.
void set_active_isa(Isa isa);

/// Precomputed constants of the post-jump kernel for one (s, t, x):
/// CDF(y) = ((y - lo) + half_q (y^2 - lo^2)) / denom on [lo, hi].
struct KernelShape {
  double lo;
  double hi;
  double half_q;
  double two_q;
  double base;   // half_q lo^2 + lo
  double denom;  // (1 - 2 eps) x (1 + x q / 2)
};

KernelShape make_kernel_shape(double epsilon, double x, double q);

struct KernelTable {
  double (*sum)(const double* x, std::size_t n);
  double (*sum_sq_dev)(const double* x, std::size_t n, double center);
  void (*inverse_cdf)(const KernelShape& shape, const double* u, double* y, std::size_t n);
  void (*kernel_cdf)(const KernelShape& shape, const double* y, double* out, std::size_t n);
  void (*recip_one_plus)(const double* x, double* out, std::size_t n);
  void (*lyapunov)(const double* x, double* out, std::size_t n);
  void (*int_power)(const double* x, double* out, std::size_t n, int power);
};

/// Kernel table of a specific ISA; throws std::invalid_argument if unsupported.
const KernelTable& kernels_for(Isa isa);

// Dispatching entry points.
double sum(std::span<const double> x);
double sum_sq_dev(std::span<const double> x, double center);
void inverse_cdf(const KernelShape& shape, std::span<const double> u, std::span<double> y);
void kernel_cdf(const KernelShape& shape, std::span<const double> y, std::span<double> out);
void recip_one_plus(std::span<const double> x, std::span<double> out);
void lyapunov(std::span<const double> x, std::span<double> out);
void int_power(std::span<const double> x, std::span<double> out, int power);

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();
}  // namespace detail

}  // namespace spinelab::simd
