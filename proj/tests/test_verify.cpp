#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "spinelab/report.hpp"
#include "spinelab/rng.hpp"
#include "spinelab/verify.hpp"

using namespace spinelab;

namespace {

ModelParams baseline() { return ModelParams(1.0, 0.25, EnvironmentProfile::constant(1.0)); }
ModelParams sinusoidal() { return ModelParams(1.0, 0.25, EnvironmentProfile::sinusoidal(1.0, 0.5)); }

std::string csv(const CheckOutcome& o) {
  std::ostringstream s;
  write_check_csv(s, o);
  return s.str();
}

}  // namespace

TEST(Verdicts, Combination) {
  EXPECT_EQ(combine(Verdict::pass, Verdict::pass), Verdict::pass);
  EXPECT_EQ(combine(Verdict::pass, Verdict::inconclusive), Verdict::inconclusive);
  EXPECT_EQ(combine(Verdict::inconclusive, Verdict::fail), Verdict::fail);
  EXPECT_STREQ(verdict_name(Verdict::inconclusive), "inconclusive");
}

TEST(DecayFitTest, RecoversExactRate) {
  std::vector<DecayPoint> g;
  for (double t : {0.5, 1.5, 2.5, 3.5}) g.push_back({t, 2.0 * std::exp(-0.7 * t), 0.01 * std::exp(-0.7 * t)});
  const auto fit = fit_log_linear(g);
  ASSERT_TRUE(fit.valid);
  EXPECT_NEAR(fit.slope, -0.7, 1e-12);
  EXPECT_NEAR(std::exp(fit.intercept), 2.0, 1e-12);
  // Relative SE 0.005 at each point; sum of (t - 2)^2 is 5.
  EXPECT_NEAR(fit.slope_se, 0.005 / std::sqrt(5.0), 1e-12);
  EXPECT_LT(fit.slope_ci_high, 0.0);
}

TEST(DecayFitTest, SkipsNonPositiveAndNeedsTwoPoints) {
  auto fit = fit_log_linear({{1, 0.0, 0.1}, {2, 0.5, 0.1}});
  EXPECT_FALSE(fit.valid);
  EXPECT_EQ(fit.points_used, 1u);
  fit = fit_log_linear({{1, 1.0, 0.0}, {2, std::exp(-1.0), 0.0}, {3, std::exp(-2.0), 0.0}});
  ASSERT_TRUE(fit.valid);
  EXPECT_NEAR(fit.slope, -1.0, 1e-12);
  EXPECT_THROW(fit_log_linear({{2, 1, 0}, {1, 1, 0}}), std::invalid_argument);
}

TEST(Checks, MeanCountExamples) {
  MeanCountConfig c;
  auto o = check_mean_count(baseline(), c, {1});
  EXPECT_EQ(o.verdict, Verdict::pass);
  EXPECT_NEAR(o.rows[0].bound_or_target, 4.4817, 1e-4);
  c.t = 0.0;
  o = check_mean_count(baseline(), c, {1});
  EXPECT_EQ(o.rows[0].estimate, 1.0);
  EXPECT_EQ(o.verdict, Verdict::pass);
  c.t = 1.0;
  c.x0 = 2.0;
  o = check_mean_count(baseline(), c, {1});
  EXPECT_NEAR(o.rows[0].bound_or_target, 4.4366, 1e-4);
  EXPECT_EQ(o.verdict, Verdict::pass);
  c.n = 99;
  EXPECT_THROW(check_mean_count(baseline(), c, {1}), std::invalid_argument);
}

TEST(Checks, MeanCountSeScaling) {
  MeanCountConfig c;
  c.n = 10000;
  const double se1 = check_mean_count(baseline(), c, {4}).rows[0].std_error;
  c.n = 20000;
  const double se2 = check_mean_count(baseline(), c, {4}).rows[0].std_error;
  EXPECT_NEAR(se2 / se1, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(Checks, MeanCountTruncationIsInconclusive) {
  MeanCountConfig c;
  c.n = 200;
  c.t = 3.0;
  c.max_individuals = 10;
  const auto o = check_mean_count(baseline(), c, {2});
  EXPECT_EQ(o.verdict, Verdict::inconclusive);
}

TEST(Checks, ManyToOneWithConstantMatchesMeanCount) {
  ManyToOneConfig m;
  m.functional = "const_one";
  m.t = 1.5;
  m.T = 0.0;
  m.n = 2000;
  m.n_spine = 100;
  const auto a = check_many_to_one(baseline(), m, {77});
  MeanCountConfig c;
  c.n = 2000;
  c.t = 1.5;
  const auto b = check_mean_count(baseline(), c, {77});
  const double m15 = mean_mass(baseline(), 1.0, 0.0, 1.5);
  EXPECT_NEAR(a.rows[0].estimate * m15, b.rows[0].estimate, 1e-12);
  EXPECT_EQ(a.rows[1].estimate, 1.0);
  EXPECT_EQ(a.rows[1].std_error, 0.0);
  EXPECT_EQ(a.verdict, Verdict::pass);
}

TEST(Checks, ManyToOneJumpCountAgrees) {
  ManyToOneConfig m;
  m.functional = "capped_jump_count";
  m.n = 5000;
  m.n_spine = 20000;
  EXPECT_EQ(check_many_to_one(baseline(), m, {12}).verdict, Verdict::pass);
  m.functional = "endpoint_power(1)";
  EXPECT_THROW(check_many_to_one(baseline(), m, {12}), std::invalid_argument);
}

TEST(Checks, VarianceRatioAtTimeZero) {
  VarianceRatioConfig c;
  c.t_grid = {0.0};
  c.n = 1000;
  const auto o = check_variance_ratio(baseline(), c, {1});
  EXPECT_EQ(o.rows[0].estimate, 1.0);
  EXPECT_EQ(o.rows[0].bound_or_target, 5.0);
  EXPECT_EQ(o.verdict, Verdict::pass);
  c.x0 = 2.0;
  EXPECT_EQ(check_variance_ratio(baseline(), c, {1}).rows[0].bound_or_target, 15.0);
  c.n = 999;
  EXPECT_THROW(check_variance_ratio(baseline(), c, {1}), std::invalid_argument);
}

TEST(Checks, GrowthRateExamples) {
  GrowthRateConfig c;
  c.t_grid = {10.0};
  auto o = estimate_growth_rate(baseline(), c, {1});
  EXPECT_NEAR(o.rows[0].estimate, 1.0, 1e-12);
  EXPECT_EQ(o.verdict, Verdict::pass);
  c.x0 = 0.01;
  c.t_grid = {1, 5, 20, 100};
  o = estimate_growth_rate(baseline(), c, {1});
  for (std::size_t i = 1; i < o.rows.size(); ++i) {
    EXPECT_GT(o.rows[i].estimate, o.rows[i - 1].estimate);
    EXPECT_LT(o.rows[i].estimate, 1.0);
  }
  EXPECT_EQ(o.verdict, Verdict::pass);
  const ModelParams fast(2.0, 0.25, EnvironmentProfile::constant(1.0));
  c.x0 = 1.0;
  c.t_grid = {50.0};
  EXPECT_NEAR(estimate_growth_rate(fast, c, {1}).rows[0].estimate, 2.0, 0.05);
  c.t_grid = {2.0, 1.0};
  EXPECT_THROW(estimate_growth_rate(baseline(), c, {1}), std::invalid_argument);
}

TEST(Checks, GrowthRateMonteCarloRows) {
  GrowthRateConfig c;
  c.t_grid = {0.5, 1.0, 20.0};
  c.n = 2000;
  const auto o = estimate_growth_rate(baseline(), c, {5});
  EXPECT_EQ(o.rows.size(), 5u);  // t = 20 is skipped for Monte Carlo
  EXPECT_EQ(o.verdict, Verdict::pass);
}

TEST(Checks, ContractionOfEqualStartsIsInconclusive) {
  ContractionConfig c;
  c.x = c.y = 1.0;
  c.n = 1000;
  c.cauchy = false;
  const auto o = estimate_contraction(baseline(), c, {1});
  for (const auto& r : o.rows) EXPECT_EQ(r.estimate, 0.0);
  EXPECT_EQ(o.verdict, Verdict::inconclusive);
}

TEST(Checks, LlnWithConstantFunctionalHasZeroError) {
  LlnConfig c;
  c.functional = "const_one";
  c.n = 200;
  c.n_spine = 10;
  c.t_grid = {0.5, 1.0, 1.5};
  const auto o = check_lln(baseline(), c, {1});
  for (const auto& r : o.rows) {
    if (r.param_point.find("l2_error") != std::string::npos) {
      EXPECT_EQ(r.estimate, 0.0);
    }
  }
  EXPECT_EQ(o.verdict, Verdict::inconclusive);
  c.t_grid = {0.5, 1.0};
  EXPECT_THROW(check_lln(baseline(), c, {1}), std::invalid_argument);
}

TEST(Checks, LlnMeanNormalizationRuns) {
  LlnConfig c;
  c.normalization = "mean";
  c.n = 500;
  c.n_spine = 2000;
  c.t_grid = {0.5, 1.0, 1.5};
  const auto o = check_lln(baseline(), c, {3});
  ASSERT_TRUE(o.fit.has_value());
  EXPECT_EQ(o.fit->grid.size(), 3u);
}

TEST(Checks, DriftFarFromCenterIsNegative) {
  DriftConfig c;
  c.x_grid = {10.0};
  c.s_grid = {0.0};
  c.n = 20000;
  const auto o = check_drift(baseline(), c, {9});
  const auto& r = o.rows[0];
  const double bound = drift_bound(baseline(), 10.0);
  EXPECT_LT(bound, 0.0);
  EXPECT_LT(r.estimate + 3 * r.std_error, 0.0);
  EXPECT_EQ(o.verdict, Verdict::pass);
}

TEST(Checks, DriftConclusionStableUnderSmallerStep) {
  DriftConfig c;
  c.x_grid = {0.5, 2.0};
  c.n = 20000;
  EXPECT_EQ(check_drift(baseline(), c, {9}).verdict, Verdict::pass);
  c.h = 0.01;
  EXPECT_EQ(check_drift(baseline(), c, {9}).verdict, Verdict::pass);
  c.s_grid = {1.995};
  EXPECT_THROW(check_drift(baseline(), c, {9}), std::invalid_argument);
}

TEST(Checks, MomentsStartingAtCap) {
  MomentsConfig c;
  c.p_list = {1};
  c.x0 = 4.0;
  c.n = 20000;
  const auto o = check_moments(baseline(), c, {2});
  for (const auto& r : o.rows) EXPECT_EQ(r.bound_or_target, 4.0);
  EXPECT_EQ(o.verdict, Verdict::pass);
  c.p_list = {0};
  EXPECT_THROW(check_moments(baseline(), c, {2}), std::invalid_argument);
}

TEST(Checks, MartingaleNeedsConstantEnvironment) {
  MartingaleConfig c;
  c.n = 1000;
  EXPECT_EQ(check_martingale(sinusoidal(), c, {1}).verdict, Verdict::inconclusive);
  c.s = c.r;
  const auto o = check_martingale(baseline(), c, {1});
  EXPECT_EQ(o.rows[0].estimate, 1.0);
  EXPECT_EQ(o.verdict, Verdict::pass);
}

TEST(Checks, QuadratureOracles) {
  PhiQuadratureConfig c;
  EXPECT_EQ(check_phi_quadrature(baseline(), c, {0}).verdict, Verdict::pass);
  EXPECT_EQ(check_phi_quadrature(sinusoidal(), c, {0}).verdict, Verdict::pass);
  const ModelParams tab(1.0, 0.25, EnvironmentProfile::tabulated({{0, 1}, {1, 2}, {3, 0.5}}));
  EXPECT_EQ(check_phi_quadrature(tab, c, {0}).verdict, Verdict::pass);
}

TEST(Checks, KernelSamplerAndBenefit) {
  KernelSamplerConfig k;
  const auto o = check_kernel_sampler(sinusoidal(), k, {3});
  EXPECT_EQ(o.verdict, Verdict::pass);
  EXPECT_LT(o.rows[0].estimate, 0.01);
  EXPECT_EQ(check_benefit_bound(sinusoidal(), {}, {0}).verdict, Verdict::pass);
}

TEST(Checks, KsStatisticDetectsWrongLaw) {
  // Uniform draws on the support are not the tilted kernel law.
  RandomStream s(1);
  std::vector<double> y(20000);
  for (auto& v : y) v = 0.25 + 0.5 * s.uniform();
  const ModelParams strong(1.0, 0.25, EnvironmentProfile::constant(5.0));
  EXPECT_GT(kernel_ks_statistic(strong, 0.0, 2.0, 1.0, y), 0.05);
}

TEST(Checks, ResultsIndependentOfWorkerCount) {
  MomentsConfig c;
  c.n = 3000;
  const auto a = check_moments(sinusoidal(), c, {42, 1});
  const auto b = check_moments(sinusoidal(), c, {42, 3});
  EXPECT_EQ(csv(a), csv(b));
  LlnConfig l;
  l.n = 300;
  l.n_spine = 600;
  EXPECT_EQ(csv(check_lln(baseline(), l, {5, 1})), csv(check_lln(baseline(), l, {5, 4})));
}
