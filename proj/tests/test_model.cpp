#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "oracles.hpp"
#include "spinelab/model.hpp"

using namespace spinelab;

namespace {

ModelParams baseline() { return ModelParams(1.0, 0.25, EnvironmentProfile::constant(1.0)); }
ModelParams sinusoidal() { return ModelParams(1.0, 0.25, EnvironmentProfile::sinusoidal(1.0, 0.5)); }
ModelParams tabulated() {
  return ModelParams(0.8, 0.2, EnvironmentProfile::tabulated({{0.0, 1.0}, {1.0, 2.0}, {2.5, 0.5}, {4.0, 1.5}}));
}

// Piecewise Simpson, split at the table knots where phi has kinks.
double phi_oracle(const ModelParams& p, double s, double t) {
  const double a = p.growth_rate();
  auto f = [&](double r) { return p.env().value(r) * std::exp(a * (r - s)); };
  double total = 0.0, lo = s;
  if (const auto* tab = std::get_if<EnvironmentProfile::Tabulated>(&p.env().shape())) {
    for (double knot : tab->times) {
      if (knot > lo && knot < t) {
        total += oracle::simpson(f, lo, knot, 1e-4);
        lo = knot;
      }
    }
  }
  return total + oracle::simpson(f, lo, t, 1e-4);
}

}  // namespace

TEST(Environment, BoundsFollowShape) {
  const auto c = EnvironmentProfile::constant(2.0);
  EXPECT_EQ(c.lower_bound(), 2.0);
  EXPECT_EQ(c.upper_bound(), 2.0);
  const auto s = EnvironmentProfile::sinusoidal(1.0, -0.5);
  EXPECT_EQ(s.lower_bound(), 0.5);
  EXPECT_EQ(s.upper_bound(), 1.5);
  const auto t = EnvironmentProfile::tabulated({{0.0, 1.0}, {1.0, 3.0}});
  EXPECT_EQ(t.lower_bound(), 1.0);
  EXPECT_EQ(t.upper_bound(), 3.0);
  EXPECT_DOUBLE_EQ(t.value(0.5), 2.0);
  EXPECT_EQ(t.value(-1.0), 1.0);
  EXPECT_EQ(t.value(7.0), 3.0);
}

TEST(Environment, RejectsInvalidProfiles) {
  EXPECT_THROW(EnvironmentProfile::constant(0.0), std::invalid_argument);
  EXPECT_THROW(EnvironmentProfile::sinusoidal(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(EnvironmentProfile::tabulated({}), std::invalid_argument);
  EXPECT_THROW(EnvironmentProfile::tabulated({{0.0, 1.0}, {0.0, 2.0}}), std::invalid_argument);
  EXPECT_THROW(EnvironmentProfile::tabulated({{0.0, 1.0}, {1.0, -2.0}}), std::invalid_argument);
}

TEST(ModelParams, EpsilonMustLieInOpenHalfInterval) {
  for (double eps : {0.0, 0.5, 0.6, -0.1}) {
    try {
      ModelParams(1.0, eps, EnvironmentProfile::constant(1.0));
      FAIL() << "accepted epsilon " << eps;
    } catch (const std::invalid_argument& e) {
      EXPECT_NE(std::string(e.what()).find("ε ∈ (0, 1/2)"), std::string::npos) << e.what();
    }
  }
  EXPECT_THROW(ModelParams(0.0, 0.25, EnvironmentProfile::constant(1.0)), std::invalid_argument);
}

TEST(PhiIntegral, ConstantMatchesExamples) {
  const auto p = baseline();
  EXPECT_NEAR(phi_integral(p, 0.0, 1.0), std::exp(1.0) - 1.0, 1e-15);
  EXPECT_EQ(phi_integral(p, 2.0, 2.0), 0.0);
  EXPECT_THROW(phi_integral(p, 1.0, 0.5), std::domain_error);
  EXPECT_THROW(phi_integral(p, -1.0, 0.5), std::domain_error);
}

TEST(PhiIntegral, AgreesWithSimpsonOracle) {
  for (const auto& p : {baseline(), sinusoidal(), tabulated()}) {
    for (double s : {0.0, 0.3, 1.0, 2.2}) {
      for (double dt : {0.0, 0.1, 0.7, 1.9, 3.0}) {
        const double ref = phi_oracle(p, s, s + dt);
        EXPECT_NEAR(phi_integral(p, s, s + dt), ref, 1e-9 * std::max(1.0, ref))
            << p.env().describe() << " s=" << s << " dt=" << dt;
      }
    }
  }
}

TEST(PhiIntegral, ChainRule) {
  for (const auto& p : {baseline(), sinusoidal(), tabulated()}) {
    const double a = p.growth_rate();
    for (double s : {0.0, 0.4}) {
      for (double u : {0.5, 1.3, 2.6}) {
        const double t = 3.7;
        const double lhs = phi_integral(p, s, t);
        const double rhs = phi_integral(p, s, u) + std::exp(a * (u - s)) * phi_integral(p, u, t);
        EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, lhs)) << p.env().describe();
      }
    }
  }
}

TEST(MeanMass, ExamplesAndSandwich) {
  const auto p = baseline();
  EXPECT_NEAR(mean_mass(p, 1.0, 0.0, 1.5), 4.48168907033806482, 1e-13);
  EXPECT_NEAR(mean_mass(p, 2.0, 0.0, 1.0), 4.43656365691809047, 1e-13);
  EXPECT_NEAR(mean_mass(p, 1.0, 0.0, 10.0), std::exp(10.0), 1e-9 * std::exp(10.0));
  for (const auto& q : {sinusoidal(), tabulated()}) {
    for (double x : {0.1, 1.0, 4.0}) {
      for (double dt : {0.0, 0.5, 2.0}) {
        const auto [lo, hi] = mean_mass_bounds(q, x, 0.5, 0.5 + dt);
        const double m = mean_mass(q, x, 0.5, 0.5 + dt);
        EXPECT_LE(lo, m * (1 + 1e-14));
        EXPECT_LE(m, hi * (1 + 1e-14));
      }
    }
  }
}

TEST(MeanMass, MonotoneInSizeAndTime) {
  const auto p = sinusoidal();
  double prev = 0.0;
  for (double x = 0.1; x < 5.0; x += 0.3) {
    const double m = mean_mass(p, x, 0.0, 1.0);
    EXPECT_GT(m, prev);
    prev = m;
  }
  prev = 0.0;
  for (double t = 0.1; t < 5.0; t += 0.3) {
    const double m = mean_mass(p, 1.0, 0.0, t);
    EXPECT_GT(m, prev);
    prev = m;
  }
}

TEST(AuxRate, SandwichAndValue) {
  for (const auto& p : {baseline(), sinusoidal(), tabulated()}) {
    for (double s : {0.0, 0.7, 1.5}) {
      for (double t : {1.5, 3.0}) {
        for (double x : {0.05, 1.0, 7.0}) {
          const double r = aux_jump_rate(p, s, t, x);
          const double phis = p.env().value(s);
          EXPECT_GE(r, x * phis * (1 - 1e-14));
          EXPECT_LE(r, 2 * x * phis * (1 + 1e-14));
        }
      }
    }
  }
  // At s = t the mean masses are 1 and the rate is 2 x phi(t).
  EXPECT_DOUBLE_EQ(aux_jump_rate(baseline(), 1.0, 1.0, 3.0), 6.0);
}

TEST(AuxKernel, DensityIntegratesToOne) {
  for (const auto& p : {baseline(), sinusoidal(), tabulated()}) {
    for (double x : {0.2, 1.0, 5.0}) {
      for (double t : {0.5, 2.0}) {
        const double eps = p.epsilon();
        const double total = oracle::simpson([&](double y) { return aux_kernel_density(p, 0.3, t, x, y); },
                                             eps * x, (1 - eps) * x, x * 1e-4);
        EXPECT_NEAR(total, 1.0, 1e-9);
      }
    }
  }
}

TEST(AuxKernel, NormalizerEqualsMeanMassAtHalf) {
  // Averaging m(y, s, t) over the uniform split law gives m(x/2, s, t).
  for (const auto& p : {baseline(), sinusoidal(), tabulated()}) {
    const double eps = p.epsilon();
    for (double x : {0.3, 2.0}) {
      const double avg = oracle::simpson([&](double y) { return mean_mass(p, y, 0.2, 1.7); }, eps * x,
                                         (1 - eps) * x, x * 1e-4) /
                         ((1 - 2 * eps) * x);
      EXPECT_NEAR(avg, mean_mass(p, x / 2, 0.2, 1.7), 1e-10);
    }
  }
}

TEST(AuxKernel, CdfMatchesIntegratedDensity) {
  const auto p = sinusoidal();
  const double x = 1.7, s = 0.4, t = 2.1, eps = p.epsilon();
  for (double frac : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
    const double y = eps * x + frac * (1 - 2 * eps) * x;
    const double ref =
        oracle::simpson([&](double z) { return aux_kernel_density(p, s, t, x, z); }, eps * x, y, 1e-5);
    EXPECT_NEAR(aux_kernel_cdf(p, s, t, x, y), ref, 1e-10);
  }
  EXPECT_EQ(aux_kernel_cdf(p, s, t, x, 0.0), 0.0);
  EXPECT_EQ(aux_kernel_cdf(p, s, t, x, x), 1.0);
}

TEST(AuxKernel, SampleInvertsCdfLikeBisection) {
  for (const auto& p : {baseline(), tabulated()}) {
    const double x = 2.5, s = 0.0, t = 1.0, eps = p.epsilon();
    EXPECT_DOUBLE_EQ(aux_kernel_sample(p, s, t, x, 0.0), eps * x);
    EXPECT_DOUBLE_EQ(aux_kernel_sample(p, s, t, x, 1.0), (1 - eps) * x);
    for (double u = 0.01; u < 1.0; u += 0.07) {
      const double ref =
          oracle::bisect([&](double y) { return aux_kernel_cdf(p, s, t, x, y) - u; }, eps * x, (1 - eps) * x);
      EXPECT_NEAR(aux_kernel_sample(p, s, t, x, u), ref, 1e-12);
    }
  }
  EXPECT_THROW(aux_kernel_sample(baseline(), 0, 1, 1, 1.5), std::domain_error);
}

TEST(Lyapunov, ConstantsAtBaseline) {
  EXPECT_NEAR(harmonic_constant(0.25), 1.19722457733621938, 1e-15);
  const auto dc = drift_constants(baseline());
  EXPECT_EQ(dc.c, 1.0);
  EXPECT_NEAR(dc.d, 4.5762674, 1e-6);
  EXPECT_NEAR(dc.d, 4.57626733649062058, 1e-14);
  EXPECT_NEAR(drift_bound(baseline(), 1.0), 2.5762674, 1e-6);
  EXPECT_LT(drift_bound(baseline(), 10.0), 0.0);
}

TEST(Lyapunov, ShapeAndLevelSets) {
  EXPECT_EQ(lyapunov_v(1.0), 2.0);
  EXPECT_GT(lyapunov_v(0.9), 2.0);
  EXPECT_GT(lyapunov_v(1.1), 2.0);
  // Strict convexity on a grid.
  for (double x = 0.1; x < 5; x += 0.1) {
    const double h = 0.05;
    EXPECT_GT(lyapunov_v(x - h) + lyapunov_v(x + h), 2 * lyapunov_v(x));
  }
  for (double R : {2.5, 3.0, 10.0}) {
    const auto [x1, x2] = level_set_roots(R);
    EXPECT_NEAR(lyapunov_v(x1), R, 1e-12 * R);
    EXPECT_NEAR(lyapunov_v(x2), R, 1e-12 * R);
    EXPECT_NEAR(x1 * x2, 1.0, 1e-14);
  }
  EXPECT_THROW(level_set_roots(2.0), std::domain_error);
}

TEST(Lyapunov, SemigroupBound) {
  const auto p = baseline();
  EXPECT_DOUBLE_EQ(semigroup_drift_bound(p, 3.0, 0.0), lyapunov_v(3.0));
  const double d = drift_constants(p).d;
  EXPECT_NEAR(semigroup_drift_bound(p, 3.0, 50.0), d, 1e-12);
}

TEST(Moments, CapsAtBaseline) {
  const auto p = baseline();
  EXPECT_NEAR(moment_constant(p, 1), 0.25, 1e-15);
  EXPECT_NEAR(moment_cap(p, 1, 1.0), 4.0, 1e-13);
  EXPECT_NEAR(moment_cap(p, 2, 1.0), 30.0930612244897959, 1e-11);
  EXPECT_NEAR(moment_cap(p, 3, 1.0), 359.593964334705075, 1e-9);
  EXPECT_EQ(moment_cap(p, 1, 6.0), 6.0);
  EXPECT_NEAR(harmonic_moment_cap(p, 1.0, 1.0), 1.88145997890955185, 1e-14);
  EXPECT_NEAR(harmonic_moment_cap(p, 1.0, 60.0), 2.39444915467243877, 1e-14);
  EXPECT_THROW(moment_constant(p, 0), std::domain_error);
}

TEST(VarianceRatio, BoundExamples) {
  const auto p = baseline();
  EXPECT_DOUBLE_EQ(variance_ratio_bound(p, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(variance_ratio_bound(p, 2.0), 15.0);
}

TEST(VarianceRatio, SecondMomentAgainstOracle) {
  const auto p = baseline();
  EXPECT_NEAR(second_moment_count(p, 1.0, 1.5), 23.5672259935257326, 1e-10);
  for (const auto& q : {baseline(), sinusoidal()}) {
    for (double x0 : {0.5, 1.0, 2.0}) {
      for (double t : {0.0, 0.5, 2.0}) {
        const double a = q.growth_rate();
        const double ref =
            1.0 + x0 * oracle::simpson(
                           [&](double s) {
                             return q.env().value(s) * std::exp(a * s) * (2 * mean_mass(q, x0, 0, s) + 1);
                           },
                           0.0, t, 1e-4);
        EXPECT_NEAR(second_moment_count(q, x0, t), ref, 1e-8 * ref);
        const double m = mean_mass(q, x0, 0, t);
        EXPECT_LE(second_moment_count(q, x0, t) / (m * m), variance_ratio_bound(q, x0));
      }
    }
  }
}

TEST(Benefit, ExamplesAndBound) {
  const auto p = baseline();
  EXPECT_NEAR(benefit_ratio(p, 1.0, 1.0, 1.0, 2.0), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(benefit_bound(p, 1.0, 1.0), 4.0);
  for (double x : {0.05, 1.0, 20.0}) {
    for (double y : {0.0, 3.0}) {
      for (double t : {0.0, 1.0, 4.0}) {
        for (double r : {0.0, 2.0, 10.0}) {
          EXPECT_LE(benefit_ratio(p, x, y, t, t + r), benefit_bound(p, x, y));
        }
      }
    }
  }
}
