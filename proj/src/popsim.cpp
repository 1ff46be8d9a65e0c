#include "spinelab/popsim.hpp"

#include <cmath>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "spinelab/numfmt.hpp"

namespace spinelab {

double Individual::size_at(double growth_rate, double t) const {
  return birth_size * std::exp(growth_rate * (t - birth_time));
}

bool Individual::alive_at(double t) const {
  return birth_time <= t && (!division_time || t < *division_time);
}

std::size_t Forest::count_at(double t) const {
  std::size_t n = 0;
  for (const Individual& ind : individuals_) n += ind.alive_at(t) ? 1 : 0;
  return n;
}

namespace {

// x0 * phi_integral(t0, u) and its derivative x0 * phi(u) e^{a (u - t0)}.
double integrated_hazard(const ModelParams& p, double t0, double x0, double u) {
  return x0 * phi_integral(p, t0, u);
}

double solve_hazard(const ModelParams& p, double t0, double x0, double budget) {
  const double a = p.growth_rate();
  // Bracket from phi1 <= phi <= phi2.
  double lo = t0 + std::log1p(a * budget / (x0 * p.phi_upper())) / a;
  double hi = t0 + std::log1p(a * budget / (x0 * p.phi_lower())) / a;
  double u = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
    const double g = integrated_hazard(p, t0, x0, u) - budget;
    if (g == 0.0) return u;
    if (g > 0.0) {
      hi = u;
    } else {
      lo = u;
    }
    const double slope = x0 * p.env().value(u) * std::exp(a * (u - t0));
    double next = u - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - u) < 1e-13) return next;
    u = next;
  }
  return u;
}

}  // namespace

double sample_division_time(const ModelParams& p, double t0, double x0, double hazard_budget) {
  if (!(x0 > 0.0)) throw std::domain_error("sample_division_time: requires x0 > 0 (size-zero cells never divide)");
  if (!(hazard_budget >= 0.0)) throw std::domain_error("sample_division_time: hazard budget must be >= 0");
  if (hazard_budget == 0.0) return t0;
  const double a = p.growth_rate();
  if (const auto* c = std::get_if<EnvironmentProfile::Constant>(&p.env().shape())) {
    return t0 + std::log1p(a * hazard_budget / (x0 * c->value)) / a;
  }
  return solve_hazard(p, t0, x0, hazard_budget);
}

std::optional<double> sample_division_time_before(const ModelParams& p, double t0, double x0,
                                                  double hazard_budget, double horizon) {
  if (!p.env().is_constant() && t0 < horizon && integrated_hazard(p, t0, x0, horizon) <= hazard_budget) {
    return std::nullopt;
  }
  const double u = sample_division_time(p, t0, x0, hazard_budget);
  if (u >= horizon) return std::nullopt;
  return u;
}

Forest simulate_forest(const ModelParams& p, double x0, double horizon, std::uint64_t seed, const ForestCaps& caps) {
  if (!(x0 > 0.0)) throw std::domain_error("simulate_forest: requires x0 > 0");
  if (!(horizon >= 0.0)) throw std::domain_error("simulate_forest: requires horizon >= 0");
  if (caps.max_individuals < 1) throw std::domain_error("simulate_forest: max_individuals must be >= 1");

  Forest forest;
  forest.horizon_ = horizon;
  forest.root_size_ = x0;
  forest.seed_ = seed;
  forest.growth_ = p.growth_rate();

  const double a = p.growth_rate();
  const double eps = p.epsilon();
  std::vector<std::uint64_t> keys;
  auto& cells = forest.individuals_;

  auto by_time_then_label = [&cells](const std::pair<double, std::size_t>& l, const std::pair<double, std::size_t>& r) {
    if (l.first != r.first) return l.first > r.first;
    return cells[l.second].label > cells[r.second].label;
  };
  std::priority_queue<std::pair<double, std::size_t>, std::vector<std::pair<double, std::size_t>>,
                      decltype(by_time_then_label)>
      pending(by_time_then_label);

  auto add_cell = [&](std::string label, double birth_time, double birth_size, std::int32_t parent,
                      std::uint64_t key) {
    RandomStream stream(key);
    Individual ind;
    ind.label = std::move(label);
    ind.birth_time = birth_time;
    ind.birth_size = birth_size;
    ind.parent = parent;
    ind.division_time = sample_division_time_before(p, birth_time, birth_size, stream.exponential(), horizon);
    cells.push_back(std::move(ind));
    keys.push_back(key);
    if (cells.back().division_time) pending.emplace(*cells.back().division_time, cells.size() - 1);
  };

  add_cell("", 0.0, x0, -1, derive_key(seed, 0));

  while (!pending.empty()) {
    const auto [time, idx] = pending.top();
    pending.pop();
    if (cells.size() + 2 > caps.max_individuals) {
      forest.truncation_time_ = time;
      break;
    }
    RandomStream stream(keys[idx]);
    stream.exponential();  // first draw went to the division time
    const double theta = eps + (1.0 - 2.0 * eps) * stream.uniform();
    const double parent_size = cells[idx].size_at(a, time);
    const double left = theta * parent_size;
    const double right = parent_size - left;
    const std::string label = cells[idx].label;
    const std::uint64_t key = keys[idx];
    cells[idx].first_child = static_cast<std::int32_t>(cells.size());
    add_cell(label + '0', time, left, static_cast<std::int32_t>(idx), derive_key(key, 1));
    add_cell(label + '1', time, right, static_cast<std::int32_t>(idx), derive_key(key, 2));
  }
  return forest;
}

std::vector<Member> population_at(const Forest& forest, double t) {
  if (!(t >= 0.0) || t > forest.horizon()) throw std::domain_error("population_at: t outside [0, horizon]");
  if (forest.truncated() && t >= *forest.truncation_time()) {
    throw TruncatedForestError("population_at: forest truncated before t");
  }
  std::vector<Member> out;
  for (const Individual& ind : forest.individuals()) {
    if (ind.alive_at(t)) out.push_back({ind.label, ind.size_at(forest.growth_rate(), t)});
  }
  return out;
}

PathWindow lineage_window(const Forest& forest, std::size_t individual, double t, double window) {
  const auto& cells = forest.individuals();
  if (individual >= cells.size()) throw std::out_of_range("lineage_window: no such individual");
  if (!(t >= 0.0) || !(window >= 0.0) || t + window > forest.horizon()) {
    throw std::domain_error("lineage_window: window outside [0, horizon]");
  }
  if (!cells[individual].alive_at(t + window)) throw std::domain_error("lineage_window: individual not alive at t + T");

  std::vector<Jump> reversed;
  std::size_t cur = individual;
  while (cells[cur].birth_time > t) {
    reversed.push_back({cells[cur].birth_time, cells[cur].birth_size});
    cur = static_cast<std::size_t>(cells[cur].parent);
  }
  const double start_size = cells[cur].size_at(forest.growth_rate(), t);
  return PathWindow(t, window, forest.growth_rate(), start_size, {reversed.rbegin(), reversed.rend()});
}

double lineage_functional_sum(const Forest& forest, double t, double window, const PathFunctional& f) {
  if (forest.truncated()) throw TruncatedForestError("lineage_functional_sum: forest is truncated");
  const double end = t + window;
  if (!(t >= 0.0) || !(window >= 0.0) || end > forest.horizon()) {
    throw std::domain_error("lineage_functional_sum: requires t + T <= horizon");
  }
  const auto& cells = forest.individuals();
  double total = 0.0;
  if (f.endpoint_only()) {
    std::vector<double> endpoints;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i].alive_at(end)) endpoints.push_back(lineage_window(forest, i, t, window).endpoint());
    }
    std::vector<double> values(endpoints.size());
    f.evaluate_endpoints(endpoints, values);
    for (double v : values) total += v;
    return total;
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].alive_at(end)) total += f(lineage_window(forest, i, t, window));
  }
  return total;
}

void write_forest_dump(std::ostream& os, const Forest& forest, const ModelParams& p) {
  os << "# spinelab forest v1\n";
  os << "# a=" << format_double(p.growth_rate()) << " epsilon=" << format_double(p.epsilon())
     << " env=" << p.env().describe() << " x0=" << format_double(forest.root_size())
     << " horizon=" << format_double(forest.horizon()) << " seed=" << forest.seed()
     << " truncated=" << (forest.truncated() ? 1 : 0) << "\n";
  os << "label,birth_time,birth_size,division_time\n";
  for (const Individual& ind : forest.individuals()) {
    os << (ind.label.empty() ? "-" : ind.label) << ',' << format_double(ind.birth_time) << ','
       << format_double(ind.birth_size) << ',' << (ind.division_time ? format_double(*ind.division_time) : "NA")
       << '\n';
  }
}

}  // namespace spinelab
