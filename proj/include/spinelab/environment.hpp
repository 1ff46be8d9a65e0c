#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace spinelab {

/// Time-varying factor phi(t) of the division rate B(t, x) = x * phi(t).
///
/// Three shapes are supported: a constant, the periodic profile
/// alpha + beta * sin(t), and a continuous piecewise-linear table that is
/// held constant outside its time range. The bounds phi1 <= phi(t) <= phi2
/// are derived from the shape and hold for every t >= 0.
class EnvironmentProfile {
 public:
  struct Constant {
    double value;
  };
  struct Sinusoidal {
    double alpha;
    double beta;
  };
  struct Tabulated {
    std::vector<double> times;
    std::vector<double> values;
  };
  using Shape = std::variant<Constant, Sinusoidal, Tabulated>;

  /// Throws std::invalid_argument unless value > 0.
  static EnvironmentProfile constant(double value);
  /// Throws std::invalid_argument unless alpha - |beta| > 0.
  static EnvironmentProfile sinusoidal(double alpha, double beta);
  /// Knots must have strictly increasing times (a repeated time would encode
  /// a jump) and strictly positive values; at least one knot is required.
  static EnvironmentProfile tabulated(std::vector<std::pair<double, double>> knots);

  double value(double t) const;
  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }
  bool is_constant() const { return std::holds_alternative<Constant>(shape_); }
  const Shape& shape() const { return shape_; }

  /// Compact description, e.g. "sinusoidal(1,0.5)".
  std::string describe() const;

 private:
  explicit EnvironmentProfile(Shape shape);

  Shape shape_;
  double lower_ = 0.0;
  double upper_ = 0.0;
};

}  // namespace spinelab
