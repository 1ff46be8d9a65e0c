#pragma once

// Monte Carlo checks of the identities, bounds and convergence statements of
// the growth-fragmentation model. Every check is a pure function of
// (model, config, seed): replica streams are derived from the check seed and
// the replica index, and reductions run in a fixed order.
//
// Acceptance rules shared by all checks:
//   * one-sided bounds pass when estimate <= bound + 3 SE;
//   * two-sided identities pass when |estimate - target| <= 3 SE;
//   * a check whose standard error exceeds se_cap_ratio times the scale of
//     its bound is inconclusive, never a pass;
//   * more than 1% truncated forests makes a check inconclusive.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "spinelab/estimator.hpp"
#include "spinelab/model.hpp"
#include "spinelab/path.hpp"

namespace spinelab {

enum class Verdict { pass, fail, inconclusive };

const char* verdict_name(Verdict v);

/// Combines verdicts: any fail wins, then any inconclusive.
Verdict combine(Verdict a, Verdict b);

/// One CSV row.
struct Measurement {
  std::string param_point;
  double t = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double bound_or_target = 0.0;
  Verdict outcome = Verdict::pass;
  std::uint64_t n = 0;
};

struct DecayPoint {
  double t;
  double value;
  double std_error;
};

/// Least-squares fit of log(value) = intercept + slope * t. Points with
/// positive standard errors are weighted by value^2 / SE^2 (delta method);
/// if every SE is zero the fit is unweighted. Non-positive values are
/// skipped.
struct DecayFit {
  std::vector<DecayPoint> grid;
  std::size_t points_used = 0;
  bool valid = false;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double slope_se = std::numeric_limits<double>::quiet_NaN();
  double slope_ci_low = std::numeric_limits<double>::quiet_NaN();
  double slope_ci_high = std::numeric_limits<double>::quiet_NaN();
};

/// Throws std::invalid_argument unless grid times are strictly increasing.
DecayFit fit_log_linear(std::vector<DecayPoint> grid);

struct CheckOutcome {
  std::string name;
  Verdict verdict = Verdict::pass;
  std::vector<Measurement> rows;
  std::uint64_t seed = 0;
  std::uint64_t replicas = 0;
  std::string detail;
  std::optional<DecayFit> fit;

  void add(Measurement m);
};

struct RunContext {
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

// ---------------------------------------------------------------------------
// Check configurations. `visit` lists every field once; it drives config
// parsing, serialization and the printed schema.
// ---------------------------------------------------------------------------

struct MeanCountConfig {
  double x0 = 1.0;
  double t = 1.5;
  std::uint64_t n = 20'000;
  std::uint64_t max_individuals = 100'000;
  double se_cap_ratio = 0.1;

  template <class V>
  void visit(V& v) {
    v.field("x0", x0, "initial size", v.gt(0));
    v.field("t", t, "observation time", v.ge(0));
    v.field("n", n, "number of forests", v.ge(100));
    v.field("max_individuals", max_individuals, "per-forest cap", v.ge(1));
    v.field("se_cap_ratio", se_cap_ratio, "maximum SE relative to the target", v.gt(0));
  }
};

struct ManyToOneConfig {
  double x0 = 1.0;
  double t = 1.0;
  double T = 0.5;
  std::string functional = "recip_one_plus_endpoint";
  std::uint64_t n = 20'000;
  std::uint64_t n_spine = 100'000;
  std::uint64_t max_individuals = 100'000;
  double se_cap_ratio = 0.1;

  template <class V>
  void visit(V& v) {
    v.field("x0", x0, "initial size", v.gt(0));
    v.field("t", t, "window start", v.ge(0));
    v.field("T", T, "window length", v.ge(0));
    v.field("functional", functional, "bounded path functional", v.bounded_functional());
    v.field("n", n, "number of forests", v.ge(2));
    v.field("n_spine", n_spine, "number of spine paths", v.ge(2));
    v.field("max_individuals", max_individuals, "per-forest cap", v.ge(1));
    v.field("se_cap_ratio", se_cap_ratio, "maximum combined SE relative to the sup norm of F", v.gt(0));
  }
};

struct LlnConfig {
  double x0 = 1.0;
  double x1 = 2.0;
  double x1_alt = 0.5;
  double T = 0.5;
  std::vector<double> t_grid{0.5, 1.5, 2.5, 3.5};
  std::string functional = "recip_one_plus_endpoint";
  std::uint64_t n = 10'000;
  std::uint64_t n_spine = 8'000'000;
  std::uint64_t max_individuals = 100'000;
  /// "empirical": divide by N_{t+T}; "mean": divide by m(x0, 0, t+T).
  std::string normalization = "empirical";

  template <class V>
  void visit(V& v) {
    v.field("x0", x0, "initial size of the population", v.gt(0));
    v.field("x1", x1, "spine start for the reference", v.gt(0));
    v.field("x1_alt", x1_alt, "second spine start for the independence check", v.gt(0));
    v.field("T", T, "window length", v.gt(0));
    v.field("t_grid", t_grid, "window starts (>= 3, increasing)", v.increasing_at_least(3));
    v.field("functional", functional, "bounded path functional", v.bounded_functional());
    v.field("n", n, "forests per grid point", v.ge(2));
    v.field("n_spine", n_spine, "spine paths per reference estimate", v.ge(2));
    v.field("max_individuals", max_individuals, "per-forest cap", v.ge(1));
    v.field("normalization", normalization, "empirical | mean", v.one_of({"empirical", "mean"}));
  }
};

struct ContractionConfig {
  double x = 0.5;
  double y = 5.0;
  double T = 0.5;
  std::vector<double> t_grid{0.5, 1.5, 2.5, 3.5};
  std::string functional = "recip_one_plus_endpoint";
  std::uint64_t n = 100'000;
  bool cauchy = true;

  template <class V>
  void visit(V& v) {
    v.field("x", x, "first spine start", v.gt(0));
    v.field("y", y, "second spine start", v.gt(0));
    v.field("T", T, "window length", v.ge(0));
    v.field("t_grid", t_grid, "window starts (>= 3, increasing)", v.increasing_at_least(3));
    v.field("functional", functional, "bounded path functional", v.bounded_functional());
    v.field("n", n, "paired spine paths per grid point", v.ge(2));
    v.field("cauchy", cauchy, "also test convergence in t (constant environment only)");
  }
};

struct DriftConfig {
  std::vector<double> x_grid{0.2, 0.5, 1.0, 2.0, 5.0};
  std::vector<double> s_grid{0.0, 1.0};
  double t = 2.0;
  double h = 0.05;
  std::uint64_t n = 50'000;
  double c_h_factor = 10.0;
  double se_cap_ratio = 0.1;

  template <class V>
  void visit(V& v) {
    v.field("x_grid", x_grid, "start sizes", v.positive_list());
    v.field("s_grid", s_grid, "start times", v.nonnegative_list());
    v.field("t", t, "terminal time of the spine", v.gt(0));
    v.field("h", h, "finite-difference step", v.gt(0));
    v.field("n", n, "spine paths per point", v.ge(2));
    v.field("c_h_factor", c_h_factor, "second-order allowance c_h = factor * (a V(x) + d)", v.ge(0));
    v.field("se_cap_ratio", se_cap_ratio, "maximum SE relative to a V(x) + d", v.gt(0));
  }
};

struct SemigroupDriftConfig {
  std::vector<double> x_grid{0.2, 0.5, 1.0, 2.0, 5.0};
  std::vector<double> s_grid{0.25, 0.5, 1.0, 2.0};
  double t = 2.0;
  std::uint64_t n = 20'000;
  double se_cap_ratio = 0.1;

  template <class V>
  void visit(V& v) {
    v.field("x_grid", x_grid, "start sizes", v.positive_list());
    v.field("s_grid", s_grid, "elapsed times", v.nonnegative_list());
    v.field("t", t, "terminal time of the spine", v.gt(0));
    v.field("n", n, "spine paths per start size", v.ge(2));
    v.field("se_cap_ratio", se_cap_ratio, "maximum SE relative to the bound", v.gt(0));
  }
};

struct MomentsConfig {
  std::vector<int> p_list{-1, 1, 2, 3};
  double x0 = 1.0;
  double t = 3.0;
  std::vector<double> s_grid{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  std::uint64_t n = 50'000;
  double se_cap_ratio = 0.1;

  template <class V>
  void visit(V& v) {
    v.field("p_list", p_list, "moment orders: -1 or positive integers", v.moment_orders());
    v.field("x0", x0, "spine start", v.gt(0));
    v.field("t", t, "terminal time of the spine", v.ge(0));
    v.field("s_grid", s_grid, "observation times (<= t)", v.nonnegative_list());
    v.field("n", n, "spine paths", v.ge(2));
    v.field("se_cap_ratio", se_cap_ratio, "maximum SE relative to the cap", v.gt(0));
  }
};

struct VarianceRatioConfig {
  double x0 = 1.0;
  std::vector<double> t_grid{0.5, 1.0, 1.5};
  std::uint64_t n = 10'000;
  std::uint64_t max_individuals = 100'000;
  double se_cap_ratio = 0.1;

  template <class V>
  void visit(V& v) {
    v.field("x0", x0, "initial size", v.gt(0));
    v.field("t_grid", t_grid, "observation times", v.nonnegative_list());
    v.field("n", n, "forests per time", v.ge(1000));
    v.field("max_individuals", max_individuals, "per-forest cap", v.ge(1));
    v.field("se_cap_ratio", se_cap_ratio, "maximum SE relative to the bound", v.gt(0));
  }
};

struct MartingaleConfig {
  double x0 = 1.0;
  double r = 0.0;
  double s = 0.5;
  double t = 1.0;
  std::uint64_t n = 50'000;
  double se_cap_ratio = 0.1;

  template <class V>
  void visit(V& v) {
    v.field("x0", x0, "start size", v.gt(0));
    v.field("r", r, "start time", v.ge(0));
    v.field("s", s, "stop time (>= r)", v.ge(0));
    v.field("t", t, "terminal time (>= s)", v.ge(0));
    v.field("n", n, "weighted paths", v.ge(2));
    v.field("se_cap_ratio", se_cap_ratio, "maximum SE of the mean weight", v.gt(0));
  }
};

struct GrowthRateConfig {
  double x0 = 1.0;
  std::vector<double> t_grid{1.0, 2.0, 5.0, 10.0, 20.0};
  double tolerance = 0.05;
  /// Forests per grid point for the Monte Carlo counterpart; 0 disables it.
  std::uint64_t n = 0;
  std::uint64_t max_individuals = 100'000;

  template <class V>
  void visit(V& v) {
    v.field("x0", x0, "initial size", v.gt(0));
    v.field("t_grid", t_grid, "increasing positive times", v.increasing_positive());
    v.field("tolerance", tolerance, "allowed |log m / t - a| at the largest time", v.gt(0));
    v.field("n", n, "forests per time for the Monte Carlo rows (0 = off)", v.ge(0));
    v.field("max_individuals", max_individuals, "per-forest cap", v.ge(1));
  }
};

struct KernelSamplerConfig {
  double x = 1.0;
  double s = 0.0;
  double t = 1.0;
  std::uint64_t n = 100'000;
  double ks_threshold = 0.01;

  template <class V>
  void visit(V& v) {
    v.field("x", x, "pre-jump size", v.gt(0));
    v.field("s", s, "jump time", v.ge(0));
    v.field("t", t, "terminal time (>= s)", v.ge(0));
    v.field("n", n, "draws", v.ge(2));
    v.field("ks_threshold", ks_threshold, "maximum Kolmogorov-Smirnov statistic", v.gt(0));
  }
};

struct PhiQuadratureConfig {
  std::vector<double> s_grid{0.0, 0.5, 1.0, 2.0};
  std::vector<double> t_offsets{0.0, 0.25, 1.0, 2.0};
  double simpson_step = 1e-5;
  double simpson_tolerance = 1e-8;
  double analytic_rel_tolerance = 1e-10;

  template <class V>
  void visit(V& v) {
    v.field("s_grid", s_grid, "lower limits", v.nonnegative_list());
    v.field("t_offsets", t_offsets, "upper limit minus lower limit", v.nonnegative_list());
    v.field("simpson_step", simpson_step, "composite Simpson step of the oracle", v.gt(0));
    v.field("simpson_tolerance", simpson_tolerance, "allowed |closed form - oracle| (relative above 1)", v.gt(0));
    v.field("analytic_rel_tolerance", analytic_rel_tolerance, "relative tolerance against b (e^{a dt} - 1) / a",
            v.gt(0));
  }
};

struct BenefitBoundConfig {
  std::vector<double> x_grid{0.1, 0.5, 1.0, 2.0, 10.0};
  std::vector<double> y_grid{0.0, 0.5, 1.0, 5.0};
  std::vector<double> t_grid{0.5, 1.0, 2.0};
  std::vector<double> r_offsets{0.0, 0.5, 2.0, 5.0};

  template <class V>
  void visit(V& v) {
    v.field("x_grid", x_grid, "population start sizes", v.positive_list());
    v.field("y_grid", y_grid, "replacement sizes", v.nonnegative_list());
    v.field("t_grid", t_grid, "replacement times", v.nonnegative_list());
    v.field("r_offsets", r_offsets, "r - t", v.nonnegative_list());
  }
};

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

CheckOutcome check_mean_count(const ModelParams& p, const MeanCountConfig& c, const RunContext& ctx);
CheckOutcome check_many_to_one(const ModelParams& p, const ManyToOneConfig& c, const RunContext& ctx);
CheckOutcome check_lln(const ModelParams& p, const LlnConfig& c, const RunContext& ctx);
CheckOutcome estimate_contraction(const ModelParams& p, const ContractionConfig& c, const RunContext& ctx);
CheckOutcome check_drift(const ModelParams& p, const DriftConfig& c, const RunContext& ctx);
CheckOutcome check_semigroup_drift(const ModelParams& p, const SemigroupDriftConfig& c, const RunContext& ctx);
CheckOutcome check_moments(const ModelParams& p, const MomentsConfig& c, const RunContext& ctx);
CheckOutcome check_variance_ratio(const ModelParams& p, const VarianceRatioConfig& c, const RunContext& ctx);
CheckOutcome check_martingale(const ModelParams& p, const MartingaleConfig& c, const RunContext& ctx);
CheckOutcome estimate_growth_rate(const ModelParams& p, const GrowthRateConfig& c, const RunContext& ctx);
CheckOutcome check_kernel_sampler(const ModelParams& p, const KernelSamplerConfig& c, const RunContext& ctx);
CheckOutcome check_phi_quadrature(const ModelParams& p, const PhiQuadratureConfig& c, const RunContext& ctx);
CheckOutcome check_benefit_bound(const ModelParams& p, const BenefitBoundConfig& c, const RunContext& ctx);

/// Composite Simpson rule with step at most `step` for phi_integral(s, t).
/// Shares nothing with the closed forms; used as their oracle.
double phi_integral_simpson(const ModelParams& p, double s, double t, double step);

/// Kolmogorov-Smirnov statistic of `sample` (sorted in place) against the
/// post-jump kernel CDF at (s, t, x).
double kernel_ks_statistic(const ModelParams& p, double s, double t, double x, std::vector<double>& sample);

}  // namespace spinelab
