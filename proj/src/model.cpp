#include "spinelab/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "spinelab/numfmt.hpp"
#include "spinelab/quadrature.hpp"
#include "spinelab/simd/kernel_math.hpp"

namespace spinelab {

namespace {

void require_time_order(double s, double t, const char* what) {
  if (!(s >= 0.0) || !(s <= t)) {
    throw std::domain_error(std::string(what) + ": requires 0 <= s <= t (got s=" + format_double(s) +
                            ", t=" + format_double(t) + ")");
  }
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) throw std::domain_error(std::string(what) + ": requires x > 0 (got " + format_double(x) + ")");
}

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0)) throw std::domain_error(std::string(what) + ": requires x >= 0 (got " + format_double(x) + ")");
}

double tabulated_phi_integral(const ModelParams& p, const EnvironmentProfile::Tabulated& tab, double s, double t) {
  const double a = p.growth_rate();
  const EnvironmentProfile& env = p.env();
  std::vector<double> cuts{s};
  for (double knot : tab.times) {
    if (knot > s && knot < t) cuts.push_back(knot);
  }
  cuts.push_back(t);

  // Piecewise smooth integrand: integrate between knots so kinks sit on panel edges.
  const double span = t - s;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    QuadratureOptions opts;
    opts.abs_tolerance = 1e-12 * (cuts[i + 1] - cuts[i]) / span;
    const auto res = adaptive_simpson([&](double r) { return env.value(r) * std::exp(a * (r - s)); }, cuts[i],
                                      cuts[i + 1], opts);
    if (!res.converged) throw std::runtime_error("phi_integral: quadrature did not converge");
    total += res.value;
  }
  return total;
}

}  // namespace

ModelParams::ModelParams(double growth_rate, double epsilon, EnvironmentProfile env)
    : a_(growth_rate), epsilon_(epsilon), env_(std::move(env)) {
  if (!(a_ > 0.0) || !std::isfinite(a_)) {
    throw std::invalid_argument("growth rate a > 0 required (got " + format_double(a_) + ")");
  }
  if (!(epsilon_ > 0.0 && epsilon_ < 0.5)) {
    throw std::invalid_argument("ε ∈ (0, 1/2) required (got " + format_double(epsilon_) + ")");
  }
}

double phi_integral(const ModelParams& p, double s, double t) {
  require_time_order(s, t, "phi_integral");
  if (s == t) return 0.0;
  const double a = p.growth_rate();
  const double dt = t - s;
  const auto& shape = p.env().shape();
  if (const auto* c = std::get_if<EnvironmentProfile::Constant>(&shape)) {
    return c->value * std::expm1(a * dt) / a;
  }
  if (const auto* sn = std::get_if<EnvironmentProfile::Sinusoidal>(&shape)) {
    const double growth = std::exp(a * dt);
    const double periodic = growth * (a * std::sin(t) - std::cos(t)) - (a * std::sin(s) - std::cos(s));
    return sn->alpha * std::expm1(a * dt) / a + sn->beta * periodic / (a * a + 1.0);
  }
  return tabulated_phi_integral(p, std::get<EnvironmentProfile::Tabulated>(shape), s, t);
}

double mean_mass(const ModelParams& p, double x, double s, double t) {
  require_nonnegative(x, "mean_mass");
  return 1.0 + x * phi_integral(p, s, t);
}

std::pair<double, double> mean_mass_bounds(const ModelParams& p, double x, double s, double t) {
  require_nonnegative(x, "mean_mass_bounds");
  require_time_order(s, t, "mean_mass_bounds");
  const double a = p.growth_rate();
  const double g = std::expm1(a * (t - s));
  return {1.0 + x / a * p.phi_lower() * g, 1.0 + x / a * p.phi_upper() * g};
}

double division_rate(const ModelParams& p, double t, double x) { return x * p.env().value(t); }

double aux_jump_rate(const ModelParams& p, double s, double t, double x) {
  require_nonnegative(x, "aux_jump_rate");
  const double q = phi_integral(p, s, t);
  return 2.0 * x * p.env().value(s) * (1.0 + 0.5 * x * q) / (1.0 + x * q);
}

double aux_kernel_density(const ModelParams& p, double s, double t, double x, double y) {
  require_positive(x, "aux_kernel_density");
  const double eps = p.epsilon();
  if (y < eps * x || y > (1.0 - eps) * x) return 0.0;
  const double q = phi_integral(p, s, t);
  return (1.0 + y * q) / (x * (1.0 - 2.0 * eps) * (1.0 + 0.5 * x * q));
}

double aux_kernel_cdf(const ModelParams& p, double s, double t, double x, double y) {
  require_positive(x, "aux_kernel_cdf");
  const double eps = p.epsilon();
  if (y <= eps * x) return 0.0;
  if (y >= (1.0 - eps) * x) return 1.0;
  const auto shape = simd::make_kernel_shape(eps, x, phi_integral(p, s, t));
  return simd::kernel_cdf_one(shape, y);
}

double aux_kernel_sample(const ModelParams& p, double s, double t, double x, double u) {
  require_positive(x, "aux_kernel_sample");
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("aux_kernel_sample: u must lie in [0, 1]");
  const auto shape = simd::make_kernel_shape(p.epsilon(), x, phi_integral(p, s, t));
  return simd::inverse_cdf_one(shape, u);
}

double lyapunov_v(double x) {
  require_positive(x, "lyapunov_v");
  return x + 1.0 / x;
}

double harmonic_constant(double epsilon) {
  const double w = 1.0 - 2.0 * epsilon;
  return (std::log((1.0 - epsilon) / epsilon) - w) / w;
}

DriftConstants drift_constants(const ModelParams& p) {
  const double a = p.growth_rate();
  const double eps = p.epsilon();
  const double d = 2.0 * p.phi_upper() * harmonic_constant(eps) +
                   3.0 * a * a / (p.phi_lower() * (1.0 + 2.0 * eps - 2.0 * eps * eps));
  return {a, d};
}

double drift_bound(const ModelParams& p, double x) {
  const auto k = drift_constants(p);
  return -k.c * lyapunov_v(x) + k.d;
}

double semigroup_drift_bound(const ModelParams& p, double x, double elapsed) {
  if (!(elapsed >= 0.0)) throw std::domain_error("semigroup_drift_bound: elapsed time must be >= 0");
  const auto k = drift_constants(p);
  const double decay = std::exp(-k.c * elapsed);
  return decay * lyapunov_v(x) + k.d / k.c * (1.0 - decay);
}

std::pair<double, double> level_set_roots(double level) {
  if (!(level > 2.0)) throw std::domain_error("level_set_roots: requires R > 2");
  const double disc = std::sqrt(level * level - 4.0);
  const double upper = 0.5 * (level + disc);
  return {1.0 / upper, upper};
}

double moment_constant(const ModelParams& p, int power) {
  if (power < 1) throw std::domain_error("moment_constant: requires p >= 1");
  const double eps = p.epsilon();
  const double k = static_cast<double>(power) + 1.0;
  const double tail = (std::pow(1.0 - eps, k) - std::pow(eps, k)) / k;
  return 2.0 * eps / (1.0 - 2.0 * eps) * p.phi_lower() * (1.0 - 2.0 * eps - tail);
}

double moment_cap(const ModelParams& p, int power, double x0) {
  require_nonnegative(x0, "moment_cap");
  const double root = p.growth_rate() * power / moment_constant(p, power);
  return std::max(std::pow(x0, power), std::pow(root, power));
}

double harmonic_moment_cap(const ModelParams& p, double x0, double s) {
  require_positive(x0, "harmonic_moment_cap");
  const double a = p.growth_rate();
  const double limit = 2.0 * p.phi_upper() * harmonic_constant(p.epsilon()) / a;
  return (1.0 / x0 - limit) * std::exp(-a * s) + limit;
}

double variance_ratio_bound(const ModelParams& p, double x0) {
  require_positive(x0, "variance_ratio_bound");
  const double a = p.growth_rate();
  const double f2 = p.phi_upper();
  const double lo = std::min(a, p.phi_lower() * x0);
  return (a * a + f2 * x0 * (a + 2.0 * f2 * x0) + f2 * f2 * x0 * x0) / (lo * lo);
}

double second_moment_count(const ModelParams& p, double x0, double t) {
  require_nonnegative(x0, "second_moment_count");
  require_time_order(0.0, t, "second_moment_count");
  const double a = p.growth_rate();
  if (const auto* c = std::get_if<EnvironmentProfile::Constant>(&p.env().shape())) {
    const double b = c->value;
    const double g1 = std::expm1(a * t);
    const double g2 = std::expm1(2.0 * a * t);
    // x0 * int_0^t b e^{as} (3 + 2 x0 b (e^{as} - 1) / a) ds
    return 1.0 + x0 * (3.0 * b * g1 / a + 2.0 * x0 * b * b / a * (g2 / (2.0 * a) - g1 / a));
  }
  const auto res = adaptive_simpson(
      [&](double s) { return p.env().value(s) * std::exp(a * s) * (2.0 * mean_mass(p, x0, 0.0, s) + 1.0); }, 0.0,
      t, QuadratureOptions{1e-10, 1'000'000});
  return 1.0 + x0 * res.value;
}

double benefit_ratio(const ModelParams& p, double x, double y, double t, double r) {
  require_time_order(t, r, "benefit_ratio");
  return mean_mass(p, x, 0.0, t) * mean_mass(p, y, t, r) / mean_mass(p, x, 0.0, r);
}

double benefit_bound(const ModelParams& p, double x, double y) {
  require_positive(x, "benefit_bound");
  require_nonnegative(y, "benefit_bound");
  const double a = p.growth_rate();
  return (1.0 + x / a * p.phi_upper()) * (1.0 + y / a * p.phi_upper()) / std::min(x / a * p.phi_lower(), 1.0);
}

}  // namespace spinelab
