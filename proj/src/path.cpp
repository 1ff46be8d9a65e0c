#include "spinelab/path.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <stdexcept>

#include "spinelab/simd/kernels.hpp"

namespace spinelab {

PathWindow::PathWindow(double start_time, double duration, double growth, double start_size,
                       std::vector<Jump> jumps)
    : start_(start_time), duration_(duration), growth_(growth), start_size_(start_size), jumps_(std::move(jumps)) {
  if (!(duration_ >= 0.0)) throw std::invalid_argument("PathWindow: duration must be >= 0");
  if (!(start_size_ > 0.0)) throw std::invalid_argument("PathWindow: start size must be > 0");
  double prev = start_;
  for (const Jump& j : jumps_) {
    if (!(j.time > prev) || j.time > end_time()) {
      throw std::invalid_argument("PathWindow: jump times must be strictly increasing inside the window");
    }
    if (!(j.size > 0.0)) throw std::invalid_argument("PathWindow: sizes must be > 0");
    prev = j.time;
  }
}

double PathWindow::value_at(double u) const {
  if (u < start_ || u > end_time()) throw std::domain_error("PathWindow::value_at: time outside window");
  // Last jump at or before u.
  const auto it = std::upper_bound(jumps_.begin(), jumps_.end(), u,
                                   [](double v, const Jump& j) { return v < j.time; });
  if (it == jumps_.begin()) return start_size_ * std::exp(growth_ * (u - start_));
  const Jump& last = *(it - 1);
  return last.size * std::exp(growth_ * (u - last.time));
}

double PathWindow::endpoint() const { return value_at(end_time()); }

std::vector<double> PathWindow::sample_grid(std::size_t steps) const {
  if (steps == 0) throw std::invalid_argument("PathWindow::sample_grid: steps must be >= 1");
  std::vector<double> out;
  out.reserve(steps + 1);
  const double h = duration_ / static_cast<double>(steps);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double u = k == steps ? end_time() : start_ + h * static_cast<double>(k);
    out.push_back(value_at(u));
  }
  return out;
}

PathFunctional::PathFunctional(std::string name, double sup_norm, Eval eval, EndpointBatch endpoint_batch)
    : name_(std::move(name)), sup_norm_(sup_norm), eval_(std::move(eval)), batch_(std::move(endpoint_batch)) {}

void PathFunctional::evaluate_endpoints(std::span<const double> endpoints, std::span<double> out) const {
  if (!batch_) throw std::logic_error("PathFunctional " + name_ + " is not an endpoint functional");
  batch_(endpoints, out);
}

PathFunctional const_one() {
  return PathFunctional("const_one", 1.0, [](const PathWindow&) { return 1.0; },
                        [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 1.0); });
}

PathFunctional recip_one_plus_endpoint() {
  return PathFunctional(
      "recip_one_plus_endpoint", 1.0, [](const PathWindow& w) { return 1.0 / (1.0 + w.endpoint()); },
      [](std::span<const double> x, std::span<double> out) { simd::recip_one_plus(x, out); });
}

PathFunctional capped_jump_count(int cap) {
  if (cap < 0) throw std::invalid_argument("capped_jump_count: cap must be >= 0");
  const std::string name = cap == 10 ? "capped_jump_count" : "capped_jump_count(" + std::to_string(cap) + ")";
  return PathFunctional(name, static_cast<double>(cap), [cap](const PathWindow& w) {
    return static_cast<double>(std::min<std::size_t>(w.jump_count(), static_cast<std::size_t>(cap)));
  });
}

PathFunctional endpoint_power(int power) {
  return PathFunctional(
      "endpoint_power(" + std::to_string(power) + ")", std::numeric_limits<double>::infinity(),
      [power](const PathWindow& w) {
        double r = 1.0;
        const double x = w.endpoint();
        for (int i = 0; i < std::abs(power); ++i) r = r * x;
        return power < 0 ? 1.0 / r : r;
      },
      [power](std::span<const double> x, std::span<double> out) { simd::int_power(x, out, power); });
}

PathFunctional make_functional(const std::string& spec) {
  if (spec == "const_one") return const_one();
  if (spec == "recip_one_plus_endpoint") return recip_one_plus_endpoint();
  if (spec == "capped_jump_count") return capped_jump_count();
  static const std::regex with_arg(R"(^(capped_jump_count|endpoint_power)\((-?[0-9]+)\)$)");
  std::smatch m;
  if (std::regex_match(spec, m, with_arg)) {
    const int arg = std::stoi(m[2].str());
    return m[1].str() == "endpoint_power" ? endpoint_power(arg) : capped_jump_count(arg);
  }
  throw std::invalid_argument("unknown functional '" + spec + "' (known: const_one, recip_one_plus_endpoint, " +
                              "capped_jump_count[(k)], endpoint_power(p))");
}

std::vector<std::string> functional_names() {
  return {"const_one", "recip_one_plus_endpoint", "capped_jump_count(k)", "endpoint_power(p)"};
}

}  // namespace spinelab
