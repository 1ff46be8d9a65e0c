#include "spinelab/suite.hpp"

#include <chrono>
#include <stdexcept>

#include "spinelab/rng.hpp"

namespace spinelab {

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> registry{
      {"mean_count", "E[N_t] against m(x0, 0, t)"},
      {"many_to_one", "population lineage sum / m against the spine expectation"},
      {"kernel_sampler", "KS distance of post-jump draws to the analytic CDF"},
      {"phi_quadrature", "closed-form phi integral against Simpson and analytic oracles"},
      {"drift", "finite-difference generator of V against -a V + d"},
      {"semigroup_drift", "E_x[V(Y_s)] against e^{-a s} V(x) + (d/a)(1 - e^{-a s})"},
      {"moments", "spine moments of order -1, 1, 2, 3 against their caps"},
      {"variance_ratio", "E[(N_t / m)^2] against its uniform bound"},
      {"martingale", "mean Feynman-Kac weight equals 1"},
      {"lln", "L2 error of the empirical lineage measure decays in t"},
      {"contraction", "spine expectations from two starts merge as t grows"},
      {"growth_rate", "log m(x0, 0, t) / t tends to a"},
      {"benefit_bound", "closed-form trait-change ratio below its bound"},
  };
  return registry;
}

std::uint64_t check_seed(std::uint64_t global_seed, const std::string& name) {
  return derive_key(global_seed, hash_name(name));
}

CheckOutcome run_check(const ExperimentConfig& config, const std::string& name) {
  const ModelParams p = config.model();
  const RunContext ctx{check_seed(config.seed, name), config.workers};
  const CheckSettings& s = config.checks;
  if (name == "mean_count") return check_mean_count(p, s.mean_count, ctx);
  if (name == "many_to_one") return check_many_to_one(p, s.many_to_one, ctx);
  if (name == "kernel_sampler") return check_kernel_sampler(p, s.kernel_sampler, ctx);
  if (name == "phi_quadrature") return check_phi_quadrature(p, s.phi_quadrature, ctx);
  if (name == "drift") return check_drift(p, s.drift, ctx);
  if (name == "semigroup_drift") return check_semigroup_drift(p, s.semigroup_drift, ctx);
  if (name == "moments") return check_moments(p, s.moments, ctx);
  if (name == "variance_ratio") return check_variance_ratio(p, s.variance_ratio, ctx);
  if (name == "martingale") return check_martingale(p, s.martingale, ctx);
  if (name == "lln") return check_lln(p, s.lln, ctx);
  if (name == "contraction") return estimate_contraction(p, s.contraction, ctx);
  if (name == "growth_rate") return estimate_growth_rate(p, s.growth_rate, ctx);
  if (name == "benefit_bound") return check_benefit_bound(p, s.benefit_bound, ctx);
  throw std::invalid_argument("unknown check: " + name);
}

SuiteResult run_suite(const ExperimentConfig& config,
                      const std::function<void(const CheckOutcome&, double seconds)>& progress) {
  using clock = std::chrono::steady_clock;
  SuiteResult result;
  const auto start = clock::now();
  for (const auto& name : config.enabled) {
    const auto t0 = clock::now();
    CheckOutcome outcome;
    try {
      outcome = run_check(config, name);
    } catch (const std::invalid_argument& e) {
      // Cross-field constraints are checked by the checks themselves.
      throw ConfigError("checks." + name, e.what());
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    result.overall = combine(result.overall, outcome.verdict);
    if (progress) progress(outcome, secs);
    result.outcomes.push_back(std::move(outcome));
  }
  result.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return result;
}

}  // namespace spinelab
