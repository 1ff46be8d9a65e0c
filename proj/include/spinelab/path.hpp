#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spinelab {

struct Jump {
  double time;  // absolute time of the jump
  double size;  // size right after the jump
};

/// Right-continuous piecewise-exponential trajectory restricted to
/// [start_time, start_time + duration]. Between jumps the value follows
/// x(u) = x(v) e^{growth (u - v)}. Jumps at exactly start_time are folded
/// into start_size; stored jumps have times in (start, start + duration].
class PathWindow {
 public:
  PathWindow(double start_time, double duration, double growth, double start_size, std::vector<Jump> jumps);

  double start_time() const { return start_; }
  double end_time() const { return start_ + duration_; }
  double duration() const { return duration_; }
  double start_size() const { return start_size_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  std::size_t jump_count() const { return jumps_.size(); }

  /// Value at absolute time u in the window.
  double value_at(double u) const;
  double endpoint() const;

  /// Values at start + k * duration / steps for k = 0..steps.
  std::vector<double> sample_grid(std::size_t steps = 256) const;

 private:
  double start_;
  double duration_;
  double growth_;
  double start_size_;
  std::vector<Jump> jumps_;
};

/// Functional of a path window. Endpoint-only functionals also expose a batch
/// form that runs through the SIMD kernels.
class PathFunctional {
 public:
  using Eval = std::function<double(const PathWindow&)>;
  using EndpointBatch = std::function<void(std::span<const double>, std::span<double>)>;

  PathFunctional(std::string name, double sup_norm, Eval eval, EndpointBatch endpoint_batch = {});

  const std::string& name() const { return name_; }
  /// Sup norm, or +inf for unbounded functionals.
  double sup_norm() const { return sup_norm_; }
  bool bounded() const { return sup_norm_ < std::numeric_limits<double>::infinity(); }
  bool endpoint_only() const { return static_cast<bool>(batch_); }

  double operator()(const PathWindow& w) const { return eval_(w); }

  /// Evaluates an endpoint-only functional on many endpoints at once.
  void evaluate_endpoints(std::span<const double> endpoints, std::span<double> out) const;

 private:
  std::string name_;
  double sup_norm_;
  Eval eval_;
  EndpointBatch batch_;
};

PathFunctional const_one();
PathFunctional recip_one_plus_endpoint();
PathFunctional capped_jump_count(int cap = 10);
PathFunctional endpoint_power(int power);

/// Looks a functional up by name: const_one, recip_one_plus_endpoint,
/// capped_jump_count, capped_jump_count(k), endpoint_power(p).
/// Throws std::invalid_argument for unknown names.
PathFunctional make_functional(const std::string& spec);

std::vector<std::string> functional_names();

}  // namespace spinelab
