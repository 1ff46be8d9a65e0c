#pragma once

#include <utility>

#include "spinelab/environment.hpp"

namespace spinelab {

/// Parameters of the size-structured growth-fragmentation model: cells grow
/// as x' = a x, divide at rate x * phi(t), and split into theta x and
/// (1 - theta) x with theta uniform on [epsilon, 1 - epsilon].
class ModelParams {
 public:
  /// Throws std::invalid_argument naming the violated constraint.
  ModelParams(double growth_rate, double epsilon, EnvironmentProfile env);

  double growth_rate() const { return a_; }
  double epsilon() const { return epsilon_; }
  const EnvironmentProfile& env() const { return env_; }
  double phi_lower() const { return env_.lower_bound(); }
  double phi_upper() const { return env_.upper_bound(); }

 private:
  double a_;
  double epsilon_;
  EnvironmentProfile env_;
};

// ---------------------------------------------------------------------------
// First-moment semigroup
// ---------------------------------------------------------------------------

/// Integral of phi(r) exp(a (r - s)) over [s, t]. Closed form for constant
/// and sinusoidal profiles; adaptive Simpson (absolute tolerance 1e-12) on
/// each linear piece of a tabulated profile.
double phi_integral(const ModelParams& p, double s, double t);

/// Expected population at t started from one cell of size x at time s:
/// 1 + x * phi_integral(s, t).
double mean_mass(const ModelParams& p, double x, double s, double t);

/// Elementary lower/upper bounds on mean_mass obtained from phi1 <= phi <= phi2.
std::pair<double, double> mean_mass_bounds(const ModelParams& p, double x, double s, double t);

double division_rate(const ModelParams& p, double t, double x);

// ---------------------------------------------------------------------------
// Auxiliary (spine) process
// ---------------------------------------------------------------------------

/// Jump rate of the spine at time s for terminal time t:
/// 2 x phi(s) m(x/2, s, t) / m(x, s, t). Lies in [x phi(s), 2 x phi(s)].
double aux_jump_rate(const ModelParams& p, double s, double t, double x);

/// Density of the post-jump size y given pre-jump size x.
double aux_kernel_density(const ModelParams& p, double s, double t, double x, double y);

/// Distribution function matching aux_kernel_density; 0 below epsilon x and
/// 1 above (1 - epsilon) x.
double aux_kernel_cdf(const ModelParams& p, double s, double t, double x, double y);

/// Inverse-CDF draw from the post-jump kernel; u in [0, 1].
double aux_kernel_sample(const ModelParams& p, double s, double t, double x, double u);

// ---------------------------------------------------------------------------
// Lyapunov function and constants of the drift/moment bounds
// ---------------------------------------------------------------------------

double lyapunov_v(double x);

struct DriftConstants {
  double c;  // contraction rate, equal to a
  double d;  // additive constant d(epsilon)
};

/// C(eps) = (log((1 - eps) / eps) - (1 - 2 eps)) / (1 - 2 eps).
double harmonic_constant(double epsilon);

DriftConstants drift_constants(const ModelParams& p);

/// Upper bound on the generator applied to V: -a V(x) + d.
double drift_bound(const ModelParams& p, double x);

/// Bound on E_x[V(Y_{r+elapsed})]: exp(-c elapsed) V(x) + (d/c)(1 - exp(-c elapsed)).
double semigroup_drift_bound(const ModelParams& p, double x, double elapsed);

/// Endpoints x1(R) < x2(R) of the level set {V < R}; requires R > 2.
std::pair<double, double> level_set_roots(double level);

/// Constant C(eps, p) of the p-th moment comparison ODE, p >= 1.
double moment_constant(const ModelParams& p, int power);

/// Cap on sup_s E_x[Y_s^p] for p >= 1: max(x^p, (a p / C(eps, p))^p).
double moment_cap(const ModelParams& p, int power, double x0);

/// Gronwall curve for E_x[1 / Y_s]: (1/x - 2 phi2 C / a) e^{-a s} + 2 phi2 C / a.
double harmonic_moment_cap(const ModelParams& p, double x0, double s);

/// Bound on E[(N_t / m(x0, 0, t))^2], uniform in t.
double variance_ratio_bound(const ModelParams& p, double x0);

/// Exact E[N_t^2] from one cell of size x0 at time 0. The total division rate
/// equals phi(t) x0 e^{a t} because mass is conserved at splits, which gives
/// E[N_t^2] = 1 + x0 * int_0^t phi(s) e^{a s} (2 m(x0, 0, s) + 1) ds.
double second_moment_count(const ModelParams& p, double x0, double t);

// ---------------------------------------------------------------------------
// Benefit of a trait change
// ---------------------------------------------------------------------------

/// m(x, 0, t) m(y, t, r) / m(x, 0, r) for r >= t.
double benefit_ratio(const ModelParams& p, double x, double y, double t, double r);

/// (1 + x phi2 / a)(1 + y phi2 / a) / min(x phi1 / a, 1); dominates benefit_ratio.
double benefit_bound(const ModelParams& p, double x, double y);

}  // namespace spinelab
