#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinelab/model.hpp"
#include "spinelab/path.hpp"
#include "spinelab/rng.hpp"

namespace spinelab {

/// One cell of the genealogy. Labels follow Ulam-Harris coding: the root is
/// the empty string and the children of u are u + '0' and u + '1'.
struct Individual {
  std::string label;
  double birth_time = 0.0;
  double birth_size = 0.0;
  std::optional<double> division_time;  // absent when alive at the horizon
  std::int32_t parent = -1;
  std::int32_t first_child = -1;  // children are stored next to each other

  double size_at(double growth_rate, double t) const;
  bool alive_at(double t) const;
};

struct ForestCaps {
  std::size_t max_individuals = 100'000;
};

class Forest;

/// Event-driven simulation from one cell of size x0 at time 0. Each cell
/// draws from its own stream keyed by (seed, label): one exponential for its
/// division time and one uniform for the split fraction, so the forest does
/// not depend on processing order. Pending divisions are processed in
/// (time, label) order; when a division would push the number of
/// individuals past the cap the run stops and the forest is flagged.
Forest simulate_forest(const ModelParams& p, double x0, double horizon, std::uint64_t seed,
                       const ForestCaps& caps = {});

/// A realized branching tree on [0, horizon]. Only birth data and division
/// times are stored; trajectories are rebuilt from the exponential flow.
class Forest {
 public:
  double horizon() const { return horizon_; }
  double root_size() const { return root_size_; }
  std::uint64_t seed() const { return seed_; }
  double growth_rate() const { return growth_; }
  bool truncated() const { return truncation_time_.has_value(); }
  /// Time of the division that exceeded the cap; results from this time on
  /// are incomplete.
  std::optional<double> truncation_time() const { return truncation_time_; }
  const std::vector<Individual>& individuals() const { return individuals_; }

  /// Number of individuals alive at t.
  std::size_t count_at(double t) const;

 private:
  friend Forest simulate_forest(const ModelParams&, double, double, std::uint64_t, const ForestCaps&);

  double horizon_ = 0.0;
  double root_size_ = 0.0;
  std::uint64_t seed_ = 0;
  double growth_ = 0.0;
  std::optional<double> truncation_time_;
  std::vector<Individual> individuals_;
};

/// Division time of a cell of size x0 born at t0: the u with
/// x0 * int_{t0}^u phi(r) e^{a (r - t0)} dr = hazard_budget. Closed form for
/// constant phi, safeguarded Newton on the monotone integrated hazard
/// otherwise (time tolerance 1e-10).
double sample_division_time(const ModelParams& p, double t0, double x0, double hazard_budget);

/// Same as sample_division_time but returns nullopt when the division falls
/// at or after `horizon`, avoiding the root search in that case.
std::optional<double> sample_division_time_before(const ModelParams& p, double t0, double x0,
                                                  double hazard_budget, double horizon);

struct Member {
  std::string label;
  double size;
};

/// Individuals alive at t with their sizes, in storage order.
std::vector<Member> population_at(const Forest& forest, double t);

/// Trajectory of the ancestor line of `individual` over [t, t + window].
PathWindow lineage_window(const Forest& forest, std::size_t individual, double t, double window);

class TruncatedForestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sum over u alive at t + window of F applied to u's ancestral path on
/// [t, t + window]. Throws if the forest is truncated.
double lineage_functional_sum(const Forest& forest, double t, double window, const PathFunctional& f);

/// Writes one record per individual:
///   label,birth_time,birth_size,division_time
/// after two '#' header lines. The root label is written as "-" and a missing
/// division time as "NA"; numbers use the shortest round-trip form.
void write_forest_dump(std::ostream& os, const Forest& forest, const ModelParams& p);

}  // namespace spinelab
