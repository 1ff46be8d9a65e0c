#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "spinelab/estimator.hpp"
#include "spinelab/model.hpp"
#include "spinelab/path.hpp"
#include "spinelab/rng.hpp"

namespace spinelab {

/// One realization of the auxiliary process Y^{(t)} for a fixed terminal
/// time t, observed on [start_time, stop_time] with stop_time <= t.
struct SpinePath {
  double terminal_time = 0.0;
  double start_time = 0.0;
  double stop_time = 0.0;
  double start_size = 0.0;
  double growth_rate = 0.0;
  std::vector<Jump> jumps;
  std::uint64_t stream_key = 0;
  std::uint64_t proposals = 0;  // thinning proposals, accepted or not

  double value_at(double u) const;
  double endpoint() const { return value_at(stop_time); }

  /// Restriction to [from, from + duration].
  PathWindow window(double from, double duration) const;
};

struct SpineOptions {
  double start_time = 0.0;
  /// Observation stops here; negative means "at the terminal time".
  double stop_time = -1.0;
  /// Width of the lookahead window after which the dominating intensity is
  /// refreshed.
  double lookahead = 0.5;
};

/// Thinning simulation of the spine. On each lookahead window the proposal
/// intensity is 2 phi2 x_u along the flow, which dominates the spine jump
/// rate; proposals come from inverting its closed-form integral and are kept
/// with probability aux_jump_rate / (2 phi2 x_u). Accepted jumps draw the new
/// size from the post-jump kernel by inverse CDF.
SpinePath simulate_spine(const ModelParams& p, double x0, double terminal_time, RandomStream& stream,
                         const SpineOptions& options = {});

SpinePath simulate_spine(const ModelParams& p, double x0, double terminal_time, std::uint64_t seed,
                         const SpineOptions& options = {});

/// Acceptance probability of a proposal at time u, size xu.
double thinning_acceptance(const ModelParams& p, double u, double terminal_time, double xu);

/// Monte Carlo estimate of E[F(Y^{(t+T)}_{t+s}, s <= T) | Y_0 = x1]. Replica i
/// uses the stream derive_key(seed, i).
EstimatorReport spine_expectation(const ModelParams& p, double x1, double t, double window, const PathFunctional& f,
                                  std::size_t replicas, std::uint64_t seed, unsigned workers = 0);

/// Path of the comparison process X (growth a, jumps at rate 2 x phi, uniform
/// fragmentation kernel) with its Feynman-Kac weight
/// exp(int_r^s B(X_v) dv) m(X_s, s, t) / m(x0, r, t).
struct WeightedPath {
  double start_time = 0.0;
  double stop_time = 0.0;
  double start_size = 0.0;
  std::vector<Jump> jumps;
  double weight = 1.0;
  double endpoint = 0.0;
};

class UnsupportedConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requires a constant environment; throws UnsupportedConfiguration
/// otherwise.
WeightedPath martingale_weight_run(const ModelParams& p, double x0, double r, double s, double t,
                                   RandomStream& stream);

/// Dump of several spine paths:
///   replica,time,size,kind
/// with kind one of start, jump, end.
void write_spine_dump(std::ostream& os, const std::vector<SpinePath>& paths, const ModelParams& p, std::uint64_t seed);

}  // namespace spinelab
