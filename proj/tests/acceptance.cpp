// Acceptance suite: one PASS/FAIL line per criterion. Parameters and
// tolerances are pinned here; the config file only supplies the seed and the
// worker count, so it cannot loosen a criterion.

#include <chrono>
#include <cmath>
#include <cstring>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "spinelab/config.hpp"
#include "spinelab/numfmt.hpp"
#include "spinelab/report.hpp"
#include "spinelab/suite.hpp"

using namespace spinelab;

namespace {

constexpr double kCriterion1Seconds = 60.0;
constexpr double kCriterion9Seconds = 900.0;
constexpr double kExpectedD = 4.5762674;
constexpr double kDTolerance = 1e-6;

void pin(ExperimentConfig& c) {
  c.a = 1.0;
  c.epsilon = 0.25;
  c.environment = EnvironmentSpec{};
  c.environment.type = "constant";
  c.environment.value = 1.0;
  auto& s = c.checks;

  s.mean_count = {};
  s.mean_count.x0 = 1.0;
  s.mean_count.t = 1.5;
  s.mean_count.n = 20'000;

  s.many_to_one = {};
  s.many_to_one.x0 = 1.0;
  s.many_to_one.t = 1.0;
  s.many_to_one.T = 0.5;
  s.many_to_one.functional = "recip_one_plus_endpoint";
  s.many_to_one.n = 20'000;
  s.many_to_one.n_spine = 100'000;

  s.kernel_sampler = {};
  s.kernel_sampler.x = 1.0;
  s.kernel_sampler.s = 0.0;
  s.kernel_sampler.t = 1.0;
  s.kernel_sampler.n = 100'000;
  s.kernel_sampler.ks_threshold = 0.01;

  s.phi_quadrature = {};
  s.phi_quadrature.simpson_step = 1e-5;
  s.phi_quadrature.simpson_tolerance = 1e-8;
  s.phi_quadrature.analytic_rel_tolerance = 1e-10;

  s.drift = {};
  s.drift.x_grid = {0.2, 0.5, 1.0, 2.0, 5.0};
  s.drift.s_grid = {0.0, 1.0};
  s.drift.h = 0.05;
  s.drift.n = 50'000;
  s.drift.c_h_factor = 10.0;

  s.moments = {};
  s.moments.p_list = {-1, 1, 2, 3};
  s.moments.x0 = 1.0;

  s.variance_ratio = {};
  s.variance_ratio.x0 = 1.0;
  s.variance_ratio.t_grid = {0.5, 1.0, 1.5};
  s.variance_ratio.n = 10'000;

  s.martingale = {};
  s.martingale.x0 = 1.0;
  s.martingale.r = 0.0;
  s.martingale.s = 0.5;
  s.martingale.t = 1.0;
  s.martingale.n = 50'000;

  s.lln = {};
  s.lln.x0 = 1.0;
  s.lln.x1 = 2.0;
  s.lln.x1_alt = 0.5;
  s.lln.T = 0.5;
  s.lln.t_grid = {0.5, 1.5, 2.5, 3.5};
  s.lln.functional = "recip_one_plus_endpoint";
  s.lln.n = 10'000;
  s.lln.normalization = "empirical";

  s.contraction = {};
  s.contraction.x = 0.5;
  s.contraction.y = 5.0;
  s.contraction.T = 0.5;
  s.contraction.t_grid = {0.5, 1.5, 2.5, 3.5};
  s.contraction.functional = "recip_one_plus_endpoint";
  s.contraction.n = 100'000;
  s.contraction.cauchy = true;

  c.enabled = check_names();
}

struct Run {
  SuiteResult result;
  std::map<std::string, double> seconds;
  std::map<std::string, std::string> csv;
};

Run run_all(const ExperimentConfig& c) {
  Run r;
  r.result = run_suite(c, [&](const CheckOutcome& o, double secs) {
    r.seconds[o.name] = secs;
    std::cerr << "  " << o.name << ": " << verdict_name(o.verdict) << " in " << format_double(std::round(secs * 10) / 10)
              << " s\n";
  });
  for (const auto& o : r.result.outcomes) {
    std::ostringstream s;
    write_check_csv(s, o);
    r.csv[o.name] = s.str();
  }
  return r;
}

const CheckOutcome& find(const Run& r, const std::string& name) {
  for (const auto& o : r.result.outcomes) {
    if (o.name == name) return o;
  }
  throw std::runtime_error("missing check " + name);
}

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " [" << detail << "]" << std::endl;
  if (!ok) ++failures;
}

bool passed(const CheckOutcome& o) { return o.verdict == Verdict::pass; }

std::string timing(double secs) { return format_double(std::round(secs * 10) / 10) + " s"; }

}  // namespace

int main(int argc, char** argv) {
  std::string config_path = SPINELAB_SOURCE_DIR "/configs/baseline.json";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0) config_path = argv[i + 1];
  }
  ExperimentConfig config;
  try {
    config = parse_config(read_config_document(config_path));
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  }
  pin(config);
  std::cerr << "acceptance run 1 (seed " << config.seed << ")\n";
  const Run first = run_all(config);

  {
    const auto& o = find(first, "mean_count");
    const double secs = first.seconds.at("mean_count");
    report(1, passed(o) && secs < kCriterion1Seconds, "mean count identity within 3 SE, under 1 minute",
           o.detail + "; " + timing(secs));
  }
  {
    const auto& o = find(first, "many_to_one");
    report(2, passed(o), "population and spine estimators agree within 3 combined SE", o.detail);
  }
  {
    const auto& o = find(first, "kernel_sampler");
    report(3, passed(o) && o.rows.at(0).estimate < 0.01, "post-jump sampler KS statistic below 0.01", o.detail);
  }
  {
    const auto& constant = find(first, "phi_quadrature");
    bool analytic_rows = false;
    for (const auto& r : constant.rows) analytic_rows |= r.param_point.find("oracle=analytic") != std::string::npos;
    const ModelParams sinus(1.0, 0.25, EnvironmentProfile::sinusoidal(1.0, 0.5));
    const auto sin_out = check_phi_quadrature(sinus, config.checks.phi_quadrature, {config.seed, config.workers});
    report(4, passed(constant) && analytic_rows && passed(sin_out),
           "phi integral: constant vs analytic at 1e-10 relative, sinusoidal vs Simpson at 1e-8",
           constant.detail + "; " + sin_out.detail);
  }
  {
    const auto& o = find(first, "drift");
    const double d = drift_constants(config.model()).d;
    report(5, passed(o) && std::abs(d - kExpectedD) <= kDTolerance,
           "finite-difference drift below -aV+d with slack; d(eps) = 4.5762674",
           "d = " + format_double(d) + "; " + std::to_string(o.rows.size()) + " points");
  }
  {
    const auto& o = find(first, "moments");
    const bool cap1 = std::abs(moment_cap(config.model(), 1, 1.0) - 4.0) < 1e-12;
    report(6, passed(o) && cap1, "spine moments p = -1, 1, 2, 3 below their caps + 3 SE",
           std::to_string(o.rows.size()) + " (p, s) points; p=1 cap " + format_double(moment_cap(config.model(), 1, 1.0)));
  }
  {
    const auto& o = find(first, "variance_ratio");
    report(7, passed(o) && o.rows.at(0).bound_or_target == 5.0, "E[(N_t/m)^2] <= 5 + 3 SE", o.detail);
  }
  {
    const auto& o = find(first, "martingale");
    report(8, passed(o), "mean martingale weight within 3 SE of 1", o.detail);
  }
  {
    const auto& o = find(first, "lln");
    const double secs = first.seconds.at("lln");
    report(9, passed(o) && secs <= kCriterion9Seconds,
           "L2 error decays beyond 3 combined SE, negative slope, x1-independence, within 15 minutes",
           o.detail + "; " + timing(secs));
  }
  {
    const auto& o = find(first, "contraction");
    report(10, passed(o), "contraction slope upper CI < 0 and Cauchy check", o.detail);
  }

  std::cerr << "acceptance run 2 (determinism)\n";
  const Run second = run_all(config);
  bool identical = first.csv.size() == second.csv.size() && first.csv.size() == check_names().size();
  std::string differing;
  for (const auto& [name, body] : first.csv) {
    const auto it = second.csv.find(name);
    if (it == second.csv.end() || it->second != body) {
      identical = false;
      differing += " " + name;
    }
  }
  report(11, identical, "full suite rerun gives byte-identical CSV bodies",
         identical ? std::to_string(first.csv.size()) + " CSVs identical" : "differ:" + differing);

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
