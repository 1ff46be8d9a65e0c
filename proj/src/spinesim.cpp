#include "spinelab/spinesim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "spinelab/numfmt.hpp"

namespace spinelab {

double SpinePath::value_at(double u) const {
  if (u < start_time || u > stop_time) throw std::domain_error("SpinePath::value_at: time outside observed range");
  const auto it =
      std::upper_bound(jumps.begin(), jumps.end(), u, [](double v, const Jump& j) { return v < j.time; });
  if (it == jumps.begin()) return start_size * std::exp(growth_rate * (u - start_time));
  const Jump& last = *(it - 1);
  return last.size * std::exp(growth_rate * (u - last.time));
}

PathWindow SpinePath::window(double from, double duration) const {
  if (from < start_time || !(duration >= 0.0) || from + duration > stop_time) {
    throw std::domain_error("SpinePath::window: window outside observed range");
  }
  const double to = from + duration;
  std::vector<Jump> inside;
  for (const Jump& j : jumps) {
    if (j.time > from && j.time <= to) inside.push_back(j);
  }
  return PathWindow(from, duration, growth_rate, value_at(from), std::move(inside));
}

double thinning_acceptance(const ModelParams& p, double u, double terminal_time, double xu) {
  return aux_jump_rate(p, u, terminal_time, xu) / (2.0 * p.phi_upper() * xu);
}

SpinePath simulate_spine(const ModelParams& p, double x0, double terminal_time, RandomStream& stream,
                         const SpineOptions& options) {
  if (!(x0 > 0.0)) throw std::domain_error("simulate_spine: requires x0 > 0");
  const double start = options.start_time;
  const double stop = options.stop_time < 0.0 ? terminal_time : options.stop_time;
  if (!(start >= 0.0) || !(start <= stop) || !(stop <= terminal_time)) {
    throw std::domain_error("simulate_spine: requires 0 <= start <= stop <= terminal time");
  }
  if (!(options.lookahead > 0.0)) throw std::domain_error("simulate_spine: lookahead must be > 0");

  SpinePath path;
  path.terminal_time = terminal_time;
  path.start_time = start;
  path.stop_time = stop;
  path.start_size = x0;
  path.growth_rate = p.growth_rate();
  path.stream_key = stream.key();

  const double a = p.growth_rate();
  const double bound_factor = 2.0 * p.phi_upper();
  double s = start;
  double x = x0;
  while (s < stop) {
    const double window_end = std::min(s + options.lookahead, stop);
    const double budget = stream.exponential();
    const double u = s + std::log1p(a * budget / (bound_factor * x)) / a;
    if (u >= window_end) {
      x *= std::exp(a * (window_end - s));
      s = window_end;
      continue;
    }
    ++path.proposals;
    const double xu = x * std::exp(a * (u - s));
    if (stream.uniform() < thinning_acceptance(p, u, terminal_time, xu)) {
      x = aux_kernel_sample(p, u, terminal_time, xu, stream.uniform());
      path.jumps.push_back({u, x});
    } else {
      x = xu;
    }
    s = u;
  }
  return path;
}

SpinePath simulate_spine(const ModelParams& p, double x0, double terminal_time, std::uint64_t seed,
                         const SpineOptions& options) {
  RandomStream stream(seed);
  return simulate_spine(p, x0, terminal_time, stream, options);
}

EstimatorReport spine_expectation(const ModelParams& p, double x1, double t, double window, const PathFunctional& f,
                                  std::size_t replicas, std::uint64_t seed, unsigned workers) {
  if (replicas < 2) throw std::invalid_argument("spine_expectation: at least two replicas are required");
  if (!(t >= 0.0) || !(window >= 0.0)) throw std::domain_error("spine_expectation: requires t >= 0 and T >= 0");
  const double terminal = t + window;
  const auto values = run_replicas<double>(replicas, workers, [&](std::size_t i) {
    RandomStream stream(derive_key(seed, i));
    const SpinePath path = simulate_spine(p, x1, terminal, stream);
    return f(path.window(t, window));
  });
  return summarize(values, seed, "spine:" + f.name());
}

WeightedPath martingale_weight_run(const ModelParams& p, double x0, double r, double s, double t,
                                   RandomStream& stream) {
  const auto* constant = std::get_if<EnvironmentProfile::Constant>(&p.env().shape());
  if (constant == nullptr) {
    throw UnsupportedConfiguration("martingale_weight_run: requires a constant environment (got " +
                                   p.env().describe() + ")");
  }
  if (!(x0 > 0.0)) throw std::domain_error("martingale_weight_run: requires x0 > 0");
  if (!(r >= 0.0 && r <= s && s <= t)) throw std::domain_error("martingale_weight_run: requires 0 <= r <= s <= t");

  const double a = p.growth_rate();
  const double b = constant->value;
  const double eps = p.epsilon();

  WeightedPath out;
  out.start_time = r;
  out.stop_time = s;
  out.start_size = x0;

  double v = r;
  double x = x0;
  double hazard = 0.0;  // int_r^s B(X_v) dv
  while (true) {
    const double budget = stream.exponential();
    const double u = v + std::log1p(a * budget / (2.0 * b * x)) / a;
    if (u >= s) {
      hazard += b * x * std::expm1(a * (s - v)) / a;
      x *= std::exp(a * (s - v));
      break;
    }
    hazard += b * x * std::expm1(a * (u - v)) / a;
    const double xu = x * std::exp(a * (u - v));
    x = (eps + (1.0 - 2.0 * eps) * stream.uniform()) * xu;
    out.jumps.push_back({u, x});
    v = u;
  }
  out.endpoint = x;
  out.weight = std::exp(hazard) * mean_mass(p, x, s, t) / mean_mass(p, x0, r, t);
  return out;
}

void write_spine_dump(std::ostream& os, const std::vector<SpinePath>& paths, const ModelParams& p,
                      std::uint64_t seed) {
  os << "# spinelab spine v1\n";
  os << "# a=" << format_double(p.growth_rate()) << " epsilon=" << format_double(p.epsilon())
     << " env=" << p.env().describe() << " seed=" << seed << " paths=" << paths.size() << "\n";
  os << "replica,time,size,kind\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const SpinePath& path = paths[i];
    os << i << ',' << format_double(path.start_time) << ',' << format_double(path.start_size) << ",start\n";
    for (const Jump& j : path.jumps) {
      os << i << ',' << format_double(j.time) << ',' << format_double(j.size) << ",jump\n";
    }
    os << i << ',' << format_double(path.stop_time) << ',' << format_double(path.endpoint()) << ",end\n";
  }
}

}  // namespace spinelab
