#pragma once

// Experiment configuration: JSON documents with a fixed set of keys.
//
//   {
//     "name": "baseline",
//     "model": {"a": 1, "epsilon": 0.25,
//               "environment": {"type": "constant", "value": 1}},
//     "seed": 20240601,
//     "workers": 0,
//     "output_dir": "spinelab-out",
//     "checks": {"mean_count": {"enabled": true, "n": 20000}, ...}
//   }
//
// Omitted keys take their defaults; unknown keys are rejected. The resolved
// document (every key filled in) is what gets hashed and written next to the
// results, so it can be fed back to reproduce a run.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinelab/model.hpp"
#include "spinelab/verify.hpp"

namespace spinelab {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Validation rule attached to a config field.
struct Constraint {
  enum class Kind {
    none,
    gt,
    ge,
    bounded_functional,
    one_of,
    increasing_at_least,
    increasing_positive,
    positive_list,
    nonnegative_list,
    moment_orders,
  };
  Kind kind = Kind::none;
  double bound = 0.0;
  std::vector<std::string> choices;

  std::string text() const;
};

/// Constraint factories shared by all field visitors.
struct ConstraintFactory {
  static Constraint gt(double b) { return {Constraint::Kind::gt, b, {}}; }
  static Constraint ge(double b) { return {Constraint::Kind::ge, b, {}}; }
  static Constraint bounded_functional() { return {Constraint::Kind::bounded_functional, 0.0, {}}; }
  static Constraint one_of(std::initializer_list<const char*> c) {
    return {Constraint::Kind::one_of, 0.0, std::vector<std::string>(c.begin(), c.end())};
  }
  static Constraint increasing_at_least(std::size_t k) {
    return {Constraint::Kind::increasing_at_least, static_cast<double>(k), {}};
  }
  static Constraint increasing_positive() { return {Constraint::Kind::increasing_positive, 0.0, {}}; }
  static Constraint positive_list() { return {Constraint::Kind::positive_list, 0.0, {}}; }
  static Constraint nonnegative_list() { return {Constraint::Kind::nonnegative_list, 0.0, {}}; }
  static Constraint moment_orders() { return {Constraint::Kind::moment_orders, 0.0, {}}; }
};

struct EnvironmentSpec {
  std::string type = "constant";
  double value = 1.0;  // constant
  double alpha = 1.0;  // sinusoidal: alpha + beta sin(t)
  double beta = 0.5;
  std::vector<double> times;  // tabulated
  std::vector<double> values;

  EnvironmentProfile build() const;
};

struct CheckSettings {
  MeanCountConfig mean_count;
  ManyToOneConfig many_to_one;
  KernelSamplerConfig kernel_sampler;
  PhiQuadratureConfig phi_quadrature;
  DriftConfig drift;
  SemigroupDriftConfig semigroup_drift;
  MomentsConfig moments;
  VarianceRatioConfig variance_ratio;
  MartingaleConfig martingale;
  LlnConfig lln;
  ContractionConfig contraction;
  GrowthRateConfig growth_rate;
  BenefitBoundConfig benefit_bound;
};

/// Calls fn(name, config) for every check, in suite order.
template <class Settings, class Fn>
void for_each_check(Settings& s, Fn&& fn) {
  fn("mean_count", s.mean_count);
  fn("many_to_one", s.many_to_one);
  fn("kernel_sampler", s.kernel_sampler);
  fn("phi_quadrature", s.phi_quadrature);
  fn("drift", s.drift);
  fn("semigroup_drift", s.semigroup_drift);
  fn("moments", s.moments);
  fn("variance_ratio", s.variance_ratio);
  fn("martingale", s.martingale);
  fn("lln", s.lln);
  fn("contraction", s.contraction);
  fn("growth_rate", s.growth_rate);
  fn("benefit_bound", s.benefit_bound);
}

struct ExperimentConfig {
  std::string name = "default";
  double a = 1.0;
  double epsilon = 0.25;
  EnvironmentSpec environment;
  std::uint64_t seed = 20240601;
  unsigned workers = 0;
  std::string output_dir = "spinelab-out";
  /// Enabled checks in suite order.
  std::vector<std::string> enabled;
  CheckSettings checks;

  ModelParams model() const;
};

/// Parses and validates a config document. Throws ConfigError naming the
/// offending key.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Reads a file; a missing path yields the defaults.
nlohmann::json read_config_document(const std::filesystem::path& path);

/// Applies `key.path=value` to a document. The value is parsed as JSON and
/// taken as a plain string if that fails.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Sets `n` of every Monte Carlo check in a document.
void apply_replicas(nlohmann::json& doc, std::uint64_t n);

/// Restricts a document to the named checks. Throws ConfigError on unknown
/// names.
void restrict_checks(nlohmann::json& doc, const std::vector<std::string>& names);

/// Fully resolved document; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& c);

/// FNV-1a of the canonical serialization of the resolved document, as 16 hex
/// digits. Equal for documents that differ only in key order, formatting or
/// spelled-out defaults.
std::string config_hash(const ExperimentConfig& c);

/// Every key with its type, default, constraint and description.
nlohmann::json config_schema();

std::vector<std::string> check_names();

}  // namespace spinelab
