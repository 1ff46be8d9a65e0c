#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "spinelab/simd/kernels.hpp"

namespace spinelab::simd {

namespace detail {
#if !SPINELAB_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif
#if !SPINELAB_HAVE_NEON
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if SPINELAB_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("SPINELAB_SIMD")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa) && isa_supported(isa)) return isa;
    }
  }
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{&kernels_for(detect())};
  return table;
}

std::atomic<Isa>& active_isa_slot() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
    case Isa::neon: return detail::neon_table() != nullptr;
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument(std::string("SIMD variant not available on this machine: ") + isa_name(isa));
  }
  switch (isa) {
    case Isa::avx2: return *detail::avx2_table();
    case Isa::neon: return *detail::neon_table();
    case Isa::scalar: break;
  }
  return detail::scalar_table();
}

Isa active_isa() { return active_isa_slot().load(); }

void set_active_isa(Isa isa) {
  const KernelTable& table = kernels_for(isa);
  active_table().store(&table);
  active_isa_slot().store(isa);
}

KernelShape make_kernel_shape(double epsilon, double x, double q) {
  KernelShape s{};
  s.lo = epsilon * x;
  s.hi = (1.0 - epsilon) * x;
  s.half_q = 0.5 * q;
  s.two_q = 2.0 * q;
  s.base = s.half_q * (s.lo * s.lo) + s.lo;
  s.denom = (1.0 - 2.0 * epsilon) * x * (1.0 + x * s.half_q);
  return s;
}

namespace {
void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("simd kernel: input and output lengths differ");
}
}  // namespace

double sum(std::span<const double> x) { return active_table().load()->sum(x.data(), x.size()); }

double sum_sq_dev(std::span<const double> x, double center) {
  return active_table().load()->sum_sq_dev(x.data(), x.size(), center);
}

void inverse_cdf(const KernelShape& shape, std::span<const double> u, std::span<double> y) {
  require_same_size(u.size(), y.size());
  active_table().load()->inverse_cdf(shape, u.data(), y.data(), u.size());
}

void kernel_cdf(const KernelShape& shape, std::span<const double> y, std::span<double> out) {
  require_same_size(y.size(), out.size());
  active_table().load()->kernel_cdf(shape, y.data(), out.data(), y.size());
}

void recip_one_plus(std::span<const double> x, std::span<double> out) {
  require_same_size(x.size(), out.size());
  active_table().load()->recip_one_plus(x.data(), out.data(), x.size());
}

void lyapunov(std::span<const double> x, std::span<double> out) {
  require_same_size(x.size(), out.size());
  active_table().load()->lyapunov(x.data(), out.data(), x.size());
}

void int_power(std::span<const double> x, std::span<double> out, int power) {
  require_same_size(x.size(), out.size());
  active_table().load()->int_power(x.data(), out.data(), x.size(), power);
}

}  // namespace spinelab::simd
