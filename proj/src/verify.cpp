#include "spinelab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "spinelab/numfmt.hpp"
#include "spinelab/popsim.hpp"
#include "spinelab/rng.hpp"
#include "spinelab/simd/kernels.hpp"
#include "spinelab/spinesim.hpp"

namespace spinelab {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
  return Verdict::pass;
}

void CheckOutcome::add(Measurement m) {
  verdict = combine(verdict, m.outcome);
  rows.push_back(std::move(m));
}

DecayFit fit_log_linear(std::vector<DecayPoint> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i].t > grid[i - 1].t)) throw std::invalid_argument("fit_log_linear: grid times must be increasing");
  }
  DecayFit fit;
  fit.grid = std::move(grid);
  std::vector<double> ts, ys, ws;
  bool weighted = true;
  for (const DecayPoint& g : fit.grid) {
    if (!(g.value > 0.0)) continue;
    ts.push_back(g.t);
    ys.push_back(std::log(g.value));
    if (g.std_error > 0.0) {
      const double rel = g.std_error / g.value;
      ws.push_back(1.0 / (rel * rel));
    } else {
      weighted = false;
      ws.push_back(1.0);
    }
  }
  fit.points_used = ts.size();
  if (ts.size() < 2) return fit;
  if (!weighted) std::fill(ws.begin(), ws.end(), 1.0);

  double sw = 0.0, st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sw += ws[i];
    st += ws[i] * ts[i];
    sy += ws[i] * ys[i];
  }
  const double tbar = st / sw;
  const double ybar = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxx += ws[i] * (ts[i] - tbar) * (ts[i] - tbar);
    sxy += ws[i] * (ts[i] - tbar) * (ys[i] - ybar);
  }
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * tbar;
  fit.valid = true;
  if (weighted) {
    fit.slope_se = std::sqrt(1.0 / sxx);
  } else if (ts.size() >= 3) {
    double rss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double r = ys[i] - fit.intercept - fit.slope * ts[i];
      rss += r * r;
    }
    fit.slope_se = std::sqrt(rss / static_cast<double>(ts.size() - 2) / sxx);
  }
  fit.slope_ci_low = fit.slope - kZ95 * fit.slope_se;
  fit.slope_ci_high = fit.slope + kZ95 * fit.slope_se;
  return fit;
}

namespace {

std::string point(std::initializer_list<std::pair<const char*, double>> kv) {
  std::string s;
  for (const auto& [k, v] : kv) {
    if (!s.empty()) s += ';';
    s += k;
    s += '=';
    s += format_double(v);
  }
  return s;
}

/// One-sided: estimate <= bound + 3 SE. A would-be pass with an oversized
/// SE is inconclusive; a violation stays a failure.
Verdict judge_upper(double estimate, double se, double bound, double se_cap) {
  if (estimate > bound + 3.0 * se) return Verdict::fail;
  if (se > se_cap) return Verdict::inconclusive;
  return Verdict::pass;
}

Verdict judge_equal(double estimate, double se, double target, double se_cap) {
  if (std::abs(estimate - target) > 3.0 * se) return Verdict::fail;
  if (se > se_cap) return Verdict::inconclusive;
  return Verdict::pass;
}

std::uint64_t grid_seed(std::uint64_t seed, std::size_t k) { return derive_key(seed, hash_name("grid") + k); }

struct ForestSample {
  std::vector<double> values;
  std::uint64_t truncated = 0;
  std::uint64_t total = 0;
  double truncated_fraction() const { return total == 0 ? 0.0 : static_cast<double>(truncated) / total; }
};

/// Simulates n forests (forest i keyed by derive_key(seed, i)) and maps each
/// untruncated forest to a value; truncated forests are counted and dropped.
template <class Fn>
ForestSample forest_values(const ModelParams& p, double x0, double horizon, std::uint64_t n, std::uint64_t seed,
                           std::uint64_t cap, unsigned workers, Fn&& fn) {
  const ForestCaps caps{static_cast<std::size_t>(cap)};
  auto raw = run_replicas<std::optional<double>>(n, workers, [&](std::size_t i) -> std::optional<double> {
    const Forest f = simulate_forest(p, x0, horizon, derive_key(seed, i), caps);
    if (f.truncated()) return std::nullopt;
    return fn(f);
  });
  ForestSample out;
  out.total = n;
  out.values.reserve(n);
  for (const auto& v : raw) {
    if (v) {
      out.values.push_back(*v);
    } else {
      ++out.truncated;
    }
  }
  return out;
}

constexpr double kMaxTruncation = 0.01;

std::string truncation_note(const ForestSample& s) {
  return "truncated " + std::to_string(s.truncated) + "/" + std::to_string(s.total);
}

std::vector<double> spine_endpoints(const ModelParams& p, double x0, double terminal, double start, double stop,
                                    std::uint64_t n, std::uint64_t seed, unsigned workers) {
  SpineOptions opts;
  opts.start_time = start;
  opts.stop_time = stop;
  return run_replicas<double>(n, workers, [&](std::size_t i) {
    RandomStream stream(derive_key(seed, i));
    return simulate_spine(p, x0, terminal, stream, opts).endpoint();
  });
}

void require_sorted_within(const std::vector<double>& grid, double hi, const char* what) {
  for (double s : grid) {
    if (s > hi) throw std::invalid_argument(std::string(what) + ": grid value " + format_double(s) + " exceeds t");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

CheckOutcome check_mean_count(const ModelParams& p, const MeanCountConfig& c, const RunContext& ctx) {
  if (c.n < 100) throw std::invalid_argument("check_mean_count: n >= 100 required");
  CheckOutcome out{"mean_count", Verdict::pass, {}, ctx.seed, c.n, {}, {}};
  const auto sample = forest_values(p, c.x0, c.t, c.n, ctx.seed, c.max_individuals, ctx.workers,
                                    [&](const Forest& f) { return static_cast<double>(f.count_at(c.t)); });
  const double target = mean_mass(p, c.x0, 0.0, c.t);
  if (sample.values.size() < 2) {
    out.add({point({{"x0", c.x0}}), c.t, 0.0, 0.0, target, Verdict::inconclusive, sample.values.size()});
    out.detail = "too few untruncated forests; " + truncation_note(sample);
    return out;
  }
  const auto r = summarize(sample.values, ctx.seed, "mean_count");
  Verdict v = judge_equal(r.mean, r.std_error, target, c.se_cap_ratio * target);
  if (sample.truncated_fraction() > kMaxTruncation) v = Verdict::inconclusive;
  out.add({point({{"x0", c.x0}}), c.t, r.mean, r.std_error, target, v, r.n_replicas});
  out.detail = "mean " + format_double(r.mean) + " vs m " + format_double(target) + " (SE " +
               format_double(r.std_error) + "); " + truncation_note(sample);
  return out;
}

CheckOutcome check_many_to_one(const ModelParams& p, const ManyToOneConfig& c, const RunContext& ctx) {
  const PathFunctional f = make_functional(c.functional);
  if (!f.bounded()) throw std::invalid_argument("check_many_to_one: functional must be bounded");
  CheckOutcome out{"many_to_one", Verdict::pass, {}, ctx.seed, c.n + c.n_spine, {}, {}};
  const double horizon = c.t + c.T;
  const double m = mean_mass(p, c.x0, 0.0, horizon);
  const auto pop = forest_values(p, c.x0, horizon, c.n, ctx.seed, c.max_individuals, ctx.workers,
                                 [&](const Forest& fr) { return lineage_functional_sum(fr, c.t, c.T, f) / m; });
  const auto spine =
      spine_expectation(p, c.x0, c.t, c.T, f, c.n_spine, derive_key(ctx.seed, hash_name("spine")), ctx.workers);
  if (pop.values.size() < 2) {
    out.add({point({{"x0", c.x0}, {"T", c.T}}), c.t, 0.0, 0.0, spine.mean, Verdict::inconclusive,
             pop.values.size()});
    out.detail = "too few untruncated forests; " + truncation_note(pop);
    return out;
  }
  const auto popr = summarize(pop.values, ctx.seed, "many_to_one:population");
  const double comb = combined_se(popr.std_error, spine.std_error);
  Verdict v = judge_equal(popr.mean, comb, spine.mean, c.se_cap_ratio * f.sup_norm());
  if (pop.truncated_fraction() > kMaxTruncation) v = Verdict::inconclusive;
  out.add({point({{"x0", c.x0}, {"T", c.T}}) + ";side=population", c.t, popr.mean, popr.std_error, spine.mean, v,
           popr.n_replicas});
  out.add({point({{"x0", c.x0}, {"T", c.T}}) + ";side=spine", c.t, spine.mean, spine.std_error, popr.mean, v,
           spine.n_replicas});
  out.detail = f.name() + ": population " + format_double(popr.mean) + " vs spine " + format_double(spine.mean) +
               " (combined SE " + format_double(comb) + "); " + truncation_note(pop);
  return out;
}

CheckOutcome check_lln(const ModelParams& p, const LlnConfig& c, const RunContext& ctx) {
  if (c.t_grid.size() < 3) throw std::invalid_argument("check_lln: t_grid needs at least 3 points");
  const PathFunctional f = make_functional(c.functional);
  if (!f.bounded()) throw std::invalid_argument("check_lln: functional must be bounded");
  const bool empirical = c.normalization == "empirical";
  if (!empirical && c.normalization != "mean") {
    throw std::invalid_argument("check_lln: normalization must be empirical or mean");
  }

  CheckOutcome out{"lln", Verdict::pass, {}, ctx.seed, 0, {}, {}};
  struct GridResult {
    double t;
    EstimatorReport ratio, spine, error;
    ForestSample sample;
  };
  std::vector<GridResult> results;
  std::optional<EstimatorReport> error_alt, spine_alt;
  const std::size_t K = c.t_grid.size();

  for (std::size_t k = 0; k < K; ++k) {
    const double t = c.t_grid[k];
    const double horizon = t + c.T;
    const double m = mean_mass(p, c.x0, 0.0, horizon);
    const std::uint64_t gs = grid_seed(ctx.seed, k);
    auto sample = forest_values(p, c.x0, horizon, c.n, gs, c.max_individuals, ctx.workers, [&](const Forest& fr) {
      const double denom = empirical ? static_cast<double>(fr.count_at(horizon)) : m;
      return lineage_functional_sum(fr, t, c.T, f) / denom;
    });
    out.replicas += c.n + c.n_spine;
    if (sample.values.size() < 2 || sample.truncated_fraction() > kMaxTruncation) {
      out.verdict = Verdict::inconclusive;
      out.detail = "excessive truncation at t=" + format_double(t) + "; " + truncation_note(sample);
      return out;
    }
    const auto spine =
        spine_expectation(p, c.x1, t, c.T, f, c.n_spine, derive_key(gs, hash_name("spine")), ctx.workers);
    std::vector<double> err(sample.values.size());
    for (std::size_t i = 0; i < err.size(); ++i) {
      const double d = sample.values[i] - spine.mean;
      err[i] = d * d;
    }
    GridResult g{t, summarize(sample.values, gs, "lln:ratio"), spine, summarize(err, gs, "lln:l2"),
                 std::move(sample)};
    if (k + 1 == K) {
      const auto alt =
          spine_expectation(p, c.x1_alt, t, c.T, f, c.n_spine, derive_key(gs, hash_name("spine_alt")), ctx.workers);
      out.replicas += c.n_spine;
      for (std::size_t i = 0; i < err.size(); ++i) {
        const double d = g.sample.values[i] - alt.mean;
        err[i] = d * d;
      }
      spine_alt = alt;
      error_alt = summarize(err, gs, "lln:l2_alt");
    }
    results.push_back(std::move(g));
  }

  std::vector<DecayPoint> grid;
  bool spine_precise = true;
  for (const auto& g : results) {
    grid.push_back({g.t, g.error.mean, g.error.std_error});
    if (g.spine.std_error > g.ratio.std_error / 5.0) spine_precise = false;
  }
  DecayFit fit = fit_log_linear(grid);

  const auto& first = results.front().error;
  const auto& last = results.back().error;
  const double decay_margin = 3.0 * combined_se(first.std_error, last.std_error);
  const bool decayed = last.mean < first.mean - decay_margin;
  const bool negative_slope = fit.valid && fit.slope < 0.0;
  const double alt_diff = std::abs(last.mean - error_alt->mean);
  const double alt_margin = 3.0 * combined_se(last.std_error, error_alt->std_error);
  const bool independent = alt_diff <= alt_margin;

  Verdict v;
  if (!spine_precise || !fit.valid) {
    v = Verdict::inconclusive;
  } else {
    v = decayed && negative_slope && independent ? Verdict::pass : Verdict::fail;
  }

  for (const auto& g : results) {
    const std::uint64_t used = g.ratio.n_replicas;
    out.add({point({{"x1", c.x1}, {"T", c.T}}) + ";quantity=l2_error", g.t, g.error.mean, g.error.std_error, 0.0, v,
             used});
    out.add({point({{"x1", c.x1}, {"T", c.T}}) + ";quantity=population_ratio", g.t, g.ratio.mean,
             g.ratio.std_error, g.spine.mean, v, used});
    out.add({point({{"x1", c.x1}, {"T", c.T}}) + ";quantity=spine_reference", g.t, g.spine.mean,
             g.spine.std_error, g.ratio.mean, v, g.spine.n_replicas});
  }
  const double t_last = results.back().t;
  out.add({point({{"x1", c.x1_alt}, {"T", c.T}}) + ";quantity=l2_error", t_last, error_alt->mean,
           error_alt->std_error, last.mean, v, error_alt->n_replicas});
  out.add({point({{"x1", c.x1_alt}, {"T", c.T}}) + ";quantity=spine_reference", t_last, spine_alt->mean,
           spine_alt->std_error, results.back().spine.mean, v, spine_alt->n_replicas});
  out.verdict = v;
  out.detail = "l2 " + format_double(first.mean) + " -> " + format_double(last.mean) + " (margin " +
               format_double(decay_margin) + "), slope " + format_double(fit.slope) + ", x1 gap " +
               format_double(alt_diff) + " (margin " + format_double(alt_margin) + ")" +
               (spine_precise ? "" : "; spine reference SE above 1/5 of population SE");
  out.fit = std::move(fit);
  return out;
}

CheckOutcome estimate_contraction(const ModelParams& p, const ContractionConfig& c, const RunContext& ctx) {
  if (c.t_grid.size() < 2) throw std::invalid_argument("estimate_contraction: t_grid needs at least 2 points");
  const PathFunctional f = make_functional(c.functional);
  if (!f.bounded()) throw std::invalid_argument("estimate_contraction: functional must be bounded");

  CheckOutcome out{"contraction", Verdict::pass, {}, ctx.seed, 0, {}, {}};
  std::vector<DecayPoint> grid;
  std::vector<EstimatorReport> level;  // P-hat F(x) per grid point
  bool any_signal = false;
  for (std::size_t k = 0; k < c.t_grid.size(); ++k) {
    const double t = c.t_grid[k];
    const double terminal = t + c.T;
    const std::uint64_t gs = grid_seed(ctx.seed, k);
    // Common random numbers: both starts consume the same stream.
    const auto pairs = run_replicas<std::pair<double, double>>(c.n, ctx.workers, [&](std::size_t i) {
      RandomStream sx(derive_key(gs, i));
      RandomStream sy(derive_key(gs, i));
      const double fx = f(simulate_spine(p, c.x, terminal, sx).window(t, c.T));
      const double fy = f(simulate_spine(p, c.y, terminal, sy).window(t, c.T));
      return std::pair{fx, fy};
    });
    out.replicas += 2 * c.n;
    std::vector<double> diff(c.n), fx(c.n);
    for (std::size_t i = 0; i < c.n; ++i) {
      fx[i] = pairs[i].first;
      diff[i] = pairs[i].first - pairs[i].second;
    }
    const auto d = summarize(diff, gs, "contraction:diff");
    level.push_back(summarize(fx, gs, "contraction:level"));
    const double gap = std::abs(d.mean);
    if (gap > 3.0 * d.std_error) any_signal = true;
    grid.push_back({t, gap, d.std_error});
  }
  DecayFit fit = fit_log_linear(grid);

  Verdict v;
  if (!any_signal || !fit.valid || !std::isfinite(fit.slope_ci_high)) {
    v = Verdict::inconclusive;
  } else {
    v = fit.slope_ci_high < 0.0 ? Verdict::pass : Verdict::fail;
  }
  for (const auto& g : grid) {
    out.add({point({{"x", c.x}, {"y", c.y}, {"T", c.T}}) + ";quantity=gap", g.t, g.value, g.std_error, 0.0, v, c.n});
  }
  out.detail = "slope " + format_double(fit.slope) + " CI [" + format_double(fit.slope_ci_low) + ", " +
               format_double(fit.slope_ci_high) + "]";

  if (c.cauchy) {
    if (!p.env().is_constant()) {
      out.detail += "; Cauchy check skipped (non-constant environment)";
    } else {
      const std::size_t K = level.size();
      auto step = [&](std::size_t k) {
        return std::pair{std::abs(level[k + 1].mean - level[k].mean),
                         combined_se(level[k + 1].std_error, level[k].std_error)};
      };
      const auto [c_first, se_first] = step(0);
      const auto [c_last, se_last] = step(K - 2);
      const double margin = 3.0 * combined_se(se_first, se_last);
      const Verdict cv = c_first - c_last > margin ? Verdict::pass : Verdict::fail;
      for (std::size_t k = 0; k + 1 < K; ++k) {
        const auto [ck, sek] = step(k);
        out.add({point({{"x", c.x}, {"T", c.T}}) + ";quantity=successive_difference", c.t_grid[k + 1], ck, sek,
                 c_first - margin, cv, c.n});
      }
      out.verdict = combine(v, cv);
      out.detail += "; Cauchy " + format_double(c_first) + " -> " + format_double(c_last) + " (margin " +
                    format_double(margin) + ")";
    }
  }
  out.fit = std::move(fit);
  return out;
}

CheckOutcome check_drift(const ModelParams& p, const DriftConfig& c, const RunContext& ctx) {
  if (!(c.h > 0.0)) throw std::invalid_argument("check_drift: h must be positive");
  for (double s : c.s_grid) {
    if (s + c.h > c.t) throw std::invalid_argument("check_drift: requires s + h <= t for every s");
  }
  const double a = p.growth_rate();
  const double d = drift_constants(p).d;
  CheckOutcome out{"drift", Verdict::pass, {}, ctx.seed, 0, {}, {}};
  std::size_t idx = 0;
  for (double s : c.s_grid) {
    for (double x : c.x_grid) {
      const std::uint64_t gs = grid_seed(ctx.seed, idx++);
      auto ends = spine_endpoints(p, x, c.t, s, s + c.h, c.n, gs, ctx.workers);
      std::vector<double> v(ends.size());
      simd::lyapunov(ends, v);
      const auto r = summarize(v, gs, "drift");
      const double vx = lyapunov_v(x);
      const double fd = (r.mean - vx) / c.h;
      const double se = r.std_error / c.h;
      const double scale = a * vx + d;
      const double bound = drift_bound(p, x);
      const double slack_second = c.c_h_factor * scale * c.h;
      // The second-order allowance is folded into the bound column.
      const Verdict verdict = judge_upper(fd, se, bound + slack_second, c.se_cap_ratio * scale);
      out.add({point({{"x", x}, {"s", s}, {"h", c.h}}), s, fd, se, bound + slack_second, verdict, c.n});
      out.replicas += c.n;
    }
  }
  out.detail = "d = " + format_double(d) + ", c_h = " + format_double(c.c_h_factor) + " (a V(x) + d)";
  return out;
}

CheckOutcome check_semigroup_drift(const ModelParams& p, const SemigroupDriftConfig& c, const RunContext& ctx) {
  require_sorted_within(c.s_grid, c.t, "check_semigroup_drift");
  CheckOutcome out{"semigroup_drift", Verdict::pass, {}, ctx.seed, 0, {}, {}};
  const double s_max = c.s_grid.empty() ? 0.0 : *std::max_element(c.s_grid.begin(), c.s_grid.end());
  for (std::size_t ix = 0; ix < c.x_grid.size(); ++ix) {
    const double x = c.x_grid[ix];
    const std::uint64_t gs = grid_seed(ctx.seed, ix);
    SpineOptions opts;
    opts.stop_time = s_max;
    const auto paths = run_replicas<SpinePath>(c.n, ctx.workers, [&](std::size_t i) {
      RandomStream stream(derive_key(gs, i));
      return simulate_spine(p, x, c.t, stream, opts);
    });
    out.replicas += c.n;
    std::vector<double> at(c.n), v(c.n);
    for (double s : c.s_grid) {
      for (std::size_t i = 0; i < c.n; ++i) at[i] = paths[i].value_at(s);
      simd::lyapunov(at, v);
      const auto r = summarize(v, gs, "semigroup_drift");
      const double bound = semigroup_drift_bound(p, x, s);
      out.add({point({{"x", x}}), s, r.mean, r.std_error, bound,
               judge_upper(r.mean, r.std_error, bound, c.se_cap_ratio * bound), c.n});
    }
  }
  out.detail = "terminal time " + format_double(c.t);
  return out;
}

CheckOutcome check_moments(const ModelParams& p, const MomentsConfig& c, const RunContext& ctx) {
  for (int q : c.p_list) {
    if (q == 0 || q < -1) throw std::invalid_argument("check_moments: orders must be -1 or positive");
  }
  require_sorted_within(c.s_grid, c.t, "check_moments");
  CheckOutcome out{"moments", Verdict::pass, {}, ctx.seed, c.n, {}, {}};
  const double s_max = c.s_grid.empty() ? 0.0 : *std::max_element(c.s_grid.begin(), c.s_grid.end());
  SpineOptions opts;
  opts.stop_time = s_max;
  const auto paths = run_replicas<SpinePath>(c.n, ctx.workers, [&](std::size_t i) {
    RandomStream stream(derive_key(ctx.seed, i));
    return simulate_spine(p, c.x0, c.t, stream, opts);
  });
  std::vector<double> at(c.n), pw(c.n);
  for (double s : c.s_grid) {
    for (std::size_t i = 0; i < c.n; ++i) at[i] = paths[i].value_at(s);
    for (int q : c.p_list) {
      simd::int_power(at, pw, q);
      const auto r = summarize(pw, ctx.seed, "moments");
      const double cap = q == -1 ? harmonic_moment_cap(p, c.x0, s) : moment_cap(p, q, c.x0);
      out.add({point({{"p", q}, {"x0", c.x0}}), s, r.mean, r.std_error, cap,
               judge_upper(r.mean, r.std_error, cap, c.se_cap_ratio * cap), c.n});
    }
  }
  out.detail = "terminal time " + format_double(c.t);
  return out;
}

CheckOutcome check_variance_ratio(const ModelParams& p, const VarianceRatioConfig& c, const RunContext& ctx) {
  if (c.n < 1000) throw std::invalid_argument("check_variance_ratio: n >= 1000 required");
  CheckOutcome out{"variance_ratio", Verdict::pass, {}, ctx.seed, 0, {}, {}};
  const double bound = variance_ratio_bound(p, c.x0);
  std::string notes;
  for (std::size_t k = 0; k < c.t_grid.size(); ++k) {
    const double t = c.t_grid[k];
    const double m = mean_mass(p, c.x0, 0.0, t);
    const std::uint64_t gs = grid_seed(ctx.seed, k);
    const auto sample = forest_values(p, c.x0, t, c.n, gs, c.max_individuals, ctx.workers, [&](const Forest& f) {
      const double r = static_cast<double>(f.count_at(t)) / m;
      return r * r;
    });
    out.replicas += c.n;
    Verdict v = Verdict::inconclusive;
    EstimatorReport r;
    if (sample.values.size() >= 2) {
      r = summarize(sample.values, gs, "variance_ratio");
      v = judge_upper(r.mean, r.std_error, bound, c.se_cap_ratio * bound);
    }
    if (sample.truncated_fraction() > kMaxTruncation) v = Verdict::inconclusive;
    out.add({point({{"x0", c.x0}}), t, r.mean, r.std_error, bound, v, sample.values.size()});
    if (!notes.empty()) notes += ", ";
    notes += truncation_note(sample);
  }
  out.detail = "bound " + format_double(bound) + "; " + notes;
  return out;
}

CheckOutcome check_martingale(const ModelParams& p, const MartingaleConfig& c, const RunContext& ctx) {
  if (!(c.r <= c.s && c.s <= c.t)) throw std::invalid_argument("check_martingale: requires r <= s <= t");
  CheckOutcome out{"martingale", Verdict::pass, {}, ctx.seed, c.n, {}, {}};
  const std::string pt = point({{"x0", c.x0}, {"r", c.r}, {"s", c.s}});
  if (!p.env().is_constant()) {
    out.add({pt, c.t, 0.0, 0.0, 1.0, Verdict::inconclusive, 0});
    out.detail = "unsupported: the weight is defined for a constant environment only (got " + p.env().describe() + ")";
    return out;
  }
  const auto w = run_replicas<double>(c.n, ctx.workers, [&](std::size_t i) {
    RandomStream stream(derive_key(ctx.seed, i));
    return martingale_weight_run(p, c.x0, c.r, c.s, c.t, stream).weight;
  });
  const bool positive = std::all_of(w.begin(), w.end(), [](double x) { return x > 0.0 && std::isfinite(x); });
  const auto r = summarize(w, ctx.seed, "martingale");
  Verdict v = judge_equal(r.mean, r.std_error, 1.0, c.se_cap_ratio);
  if (!positive) v = Verdict::fail;
  out.add({pt, c.t, r.mean, r.std_error, 1.0, v, c.n});
  out.detail = "mean weight " + format_double(r.mean) + " (SE " + format_double(r.std_error) + ")" +
               (positive ? "" : "; non-positive weight found");
  return out;
}

CheckOutcome estimate_growth_rate(const ModelParams& p, const GrowthRateConfig& c, const RunContext& ctx) {
  if (c.t_grid.empty()) throw std::invalid_argument("estimate_growth_rate: empty t_grid");
  for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
    if (!(c.t_grid[i] > 0.0) || (i > 0 && !(c.t_grid[i] > c.t_grid[i - 1]))) {
      throw std::invalid_argument("estimate_growth_rate: t_grid must be positive and increasing");
    }
  }
  const double a = p.growth_rate();
  CheckOutcome out{"growth_rate", Verdict::pass, {}, ctx.seed, 0, {}, {}};
  std::vector<DecayPoint> deviation;
  for (std::size_t k = 0; k < c.t_grid.size(); ++k) {
    const double t = c.t_grid[k];
    const double rate = std::log(mean_mass(p, c.x0, 0.0, t)) / t;
    deviation.push_back({t, std::abs(rate - a), 0.0});
    // Only the largest time carries the criterion; earlier rows are reported.
    Verdict v = Verdict::pass;
    if (k + 1 == c.t_grid.size()) v = std::abs(rate - a) <= c.tolerance ? Verdict::pass : Verdict::fail;
    out.add({point({{"x0", c.x0}}) + ";quantity=closed_form", t, rate, 0.0, a, v, 0});
  }
  std::string skipped;
  if (c.n > 0) {
    for (std::size_t k = 0; k < c.t_grid.size(); ++k) {
      const double t = c.t_grid[k];
      const double m = mean_mass(p, c.x0, 0.0, t);
      if (m > static_cast<double>(c.max_individuals) / 100.0) {
        skipped += (skipped.empty() ? "" : ",") + format_double(t);
        continue;
      }
      const std::uint64_t gs = grid_seed(ctx.seed, k);
      const auto sample = forest_values(p, c.x0, t, c.n, gs, c.max_individuals, ctx.workers,
                                        [&](const Forest& f) { return static_cast<double>(f.count_at(t)); });
      out.replicas += c.n;
      if (sample.values.size() < 2) continue;
      const auto r = summarize(sample.values, gs, "growth_rate");
      const double est = std::log(r.mean) / t;
      const double se = r.std_error / (r.mean * t);
      Verdict v = judge_equal(est, se, std::log(m) / t, std::numeric_limits<double>::infinity());
      if (sample.truncated_fraction() > kMaxTruncation) v = Verdict::inconclusive;
      out.add({point({{"x0", c.x0}}) + ";quantity=monte_carlo", t, est, se, std::log(m) / t, v, r.n_replicas});
    }
  }
  out.fit = fit_log_linear(deviation);
  out.detail = "log m / t at t=" + format_double(c.t_grid.back()) + ": " + format_double(out.rows[c.t_grid.size() - 1].estimate) +
               " (a = " + format_double(a) + ", tolerance " + format_double(c.tolerance) + ")" +
               (skipped.empty() ? "" : "; Monte Carlo skipped at t=" + skipped);
  return out;
}

double kernel_ks_statistic(const ModelParams& p, double s, double t, double x, std::vector<double>& sample) {
  std::sort(sample.begin(), sample.end());
  const auto shape = simd::make_kernel_shape(p.epsilon(), x, phi_integral(p, s, t));
  std::vector<double> cdf(sample.size());
  simd::kernel_cdf(shape, sample, cdf);
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    d = std::max(d, std::max(cdf[i] - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - cdf[i]));
  }
  return d;
}

CheckOutcome check_kernel_sampler(const ModelParams& p, const KernelSamplerConfig& c, const RunContext& ctx) {
  if (!(c.s <= c.t)) throw std::invalid_argument("check_kernel_sampler: requires s <= t");
  CheckOutcome out{"kernel_sampler", Verdict::pass, {}, ctx.seed, c.n, {}, {}};
  RandomStream stream(ctx.seed);
  std::vector<double> u(c.n), y(c.n);
  for (auto& v : u) v = stream.uniform();
  const auto shape = simd::make_kernel_shape(p.epsilon(), c.x, phi_integral(p, c.s, c.t));
  simd::inverse_cdf(shape, u, y);
  const bool in_support = std::all_of(y.begin(), y.end(), [&](double v) { return v >= shape.lo && v <= shape.hi; });
  const double ks = kernel_ks_statistic(p, c.s, c.t, c.x, y);
  const Verdict v = in_support && ks < c.ks_threshold ? Verdict::pass : Verdict::fail;
  out.add({point({{"x", c.x}, {"s", c.s}}), c.t, ks, 0.0, c.ks_threshold, v, c.n});
  out.detail = "KS " + format_double(ks) + (in_support ? "" : "; draw outside support");
  return out;
}

double phi_integral_simpson(const ModelParams& p, double s, double t, double step) {
  if (!(s <= t)) throw std::invalid_argument("phi_integral_simpson: requires s <= t");
  if (s == t) return 0.0;
  std::size_t n = static_cast<std::size_t>(std::ceil((t - s) / step));
  if (n % 2 == 1) ++n;
  if (n < 2) n = 2;
  const double h = (t - s) / static_cast<double>(n);
  const double a = p.growth_rate();
  std::vector<double> terms(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double r = i == n ? t : s + static_cast<double>(i) * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    terms[i] = w * p.env().value(r) * std::exp(a * (r - s));
  }
  return simd::sum(terms) * h / 3.0;
}

CheckOutcome check_phi_quadrature(const ModelParams& p, const PhiQuadratureConfig& c, const RunContext& ctx) {
  CheckOutcome out{"phi_quadrature", Verdict::pass, {}, ctx.seed, 0, {}, {}};
  const auto* constant = std::get_if<EnvironmentProfile::Constant>(&p.env().shape());
  const double a = p.growth_rate();
  double worst = 0.0;
  for (double s : c.s_grid) {
    for (double dt : c.t_offsets) {
      const double t = s + dt;
      const double value = phi_integral(p, s, t);
      const double ref = phi_integral_simpson(p, s, t, c.simpson_step);
      const double tol = c.simpson_tolerance * std::max(1.0, std::abs(ref));
      const double err = std::abs(value - ref);
      worst = std::max(worst, err / std::max(1.0, std::abs(ref)));
      out.add({point({{"s", s}}) + ";oracle=simpson", t, value, err, ref, err <= tol ? Verdict::pass : Verdict::fail,
               0});
      if (constant != nullptr) {
        const double exact = constant->value * (std::exp(a * dt) - 1.0) / a;
        const double rel = std::abs(value - exact);
        const bool ok = rel <= c.analytic_rel_tolerance * std::abs(exact);
        out.add({point({{"s", s}}) + ";oracle=analytic", t, value, rel, exact, ok ? Verdict::pass : Verdict::fail,
                 0});
      }
    }
  }
  out.detail = p.env().describe() + ": worst scaled Simpson deviation " + format_double(worst);
  return out;
}

CheckOutcome check_benefit_bound(const ModelParams& p, const BenefitBoundConfig& c, const RunContext& ctx) {
  CheckOutcome out{"benefit_bound", Verdict::pass, {}, ctx.seed, 0, {}, {}};
  for (double x : c.x_grid) {
    for (double y : c.y_grid) {
      double worst = 0.0;
      std::uint64_t points = 0;
      for (double t : c.t_grid) {
        for (double dr : c.r_offsets) {
          worst = std::max(worst, benefit_ratio(p, x, y, t, t + dr));
          ++points;
        }
      }
      const double bound = benefit_bound(p, x, y);
      const Verdict v = worst <= bound * (1.0 + 1e-12) ? Verdict::pass : Verdict::fail;
      out.add({point({{"x", x}, {"y", y}}), 0.0, worst, 0.0, bound, v, points});
    }
  }
  out.detail = "max of the ratio over the (t, r) grid against the bound";
  return out;
}

}  // namespace spinelab
