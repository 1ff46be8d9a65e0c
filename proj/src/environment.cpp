#include "spinelab/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spinelab/numfmt.hpp"

namespace spinelab {

EnvironmentProfile::EnvironmentProfile(Shape shape) : shape_(std::move(shape)) {
  if (const auto* c = std::get_if<Constant>(&shape_)) {
    lower_ = upper_ = c->value;
  } else if (const auto* s = std::get_if<Sinusoidal>(&shape_)) {
    lower_ = s->alpha - std::fabs(s->beta);
    upper_ = s->alpha + std::fabs(s->beta);
  } else {
    const auto& tab = std::get<Tabulated>(shape_);
    const auto [lo, hi] = std::minmax_element(tab.values.begin(), tab.values.end());
    lower_ = *lo;
    upper_ = *hi;
  }
}

EnvironmentProfile EnvironmentProfile::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("constant environment requires value > 0 (got " + format_double(value) + ")");
  }
  return EnvironmentProfile(Constant{value});
}

EnvironmentProfile EnvironmentProfile::sinusoidal(double alpha, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !(alpha - std::fabs(beta) > 0.0)) {
    throw std::invalid_argument("sinusoidal environment requires alpha - |beta| > 0 (got alpha=" +
                                format_double(alpha) + ", beta=" + format_double(beta) + ")");
  }
  return EnvironmentProfile(Sinusoidal{alpha, beta});
}

EnvironmentProfile EnvironmentProfile::tabulated(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw std::invalid_argument("tabulated environment requires at least one knot");
  Tabulated tab;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto [t, v] = knots[i];
    if (!std::isfinite(t) || !std::isfinite(v)) {
      throw std::invalid_argument("tabulated environment: knots must be finite");
    }
    if (!(v > 0.0)) {
      throw std::invalid_argument("tabulated environment: values must be > 0 (knot " + std::to_string(i) + ")");
    }
    if (i > 0 && !(t > knots[i - 1].first)) {
      throw std::invalid_argument(
          "tabulated environment: times must be strictly increasing; step profiles are not continuous (knot " +
          std::to_string(i) + ")");
    }
    tab.times.push_back(t);
    tab.values.push_back(v);
  }
  return EnvironmentProfile(std::move(tab));
}

double EnvironmentProfile::value(double t) const {
  if (const auto* c = std::get_if<Constant>(&shape_)) return c->value;
  if (const auto* s = std::get_if<Sinusoidal>(&shape_)) return s->alpha + s->beta * std::sin(t);
  const auto& tab = std::get<Tabulated>(shape_);
  if (t <= tab.times.front()) return tab.values.front();
  if (t >= tab.times.back()) return tab.values.back();
  const auto it = std::upper_bound(tab.times.begin(), tab.times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - tab.times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - tab.times[lo]) / (tab.times[hi] - tab.times[lo]);
  return tab.values[lo] + w * (tab.values[hi] - tab.values[lo]);
}

std::string EnvironmentProfile::describe() const {
  std::ostringstream os;
  if (const auto* c = std::get_if<Constant>(&shape_)) {
    os << "constant(" << format_double(c->value) << ")";
  } else if (const auto* s = std::get_if<Sinusoidal>(&shape_)) {
    os << "sinusoidal(" << format_double(s->alpha) << "," << format_double(s->beta) << ")";
  } else {
    const auto& tab = std::get<Tabulated>(shape_);
    os << "tabulated(";
    for (std::size_t i = 0; i < tab.times.size(); ++i) {
      if (i) os << ";";
      os << format_double(tab.times[i]) << ":" << format_double(tab.values[i]);
    }
    os << ")";
  }
  return os.str();
}

}  // namespace spinelab
