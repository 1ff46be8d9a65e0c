#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spinelab/config.hpp"
#include "spinelab/verify.hpp"

namespace spinelab {

struct CheckInfo {
  std::string name;
  std::string description;
};

/// All checks in suite order.
const std::vector<CheckInfo>& check_registry();

/// Seed of a check: derive_key(global seed, hash_name(name)).
std::uint64_t check_seed(std::uint64_t global_seed, const std::string& name);

struct SuiteResult {
  std::vector<CheckOutcome> outcomes;
  Verdict overall = Verdict::pass;
  double wall_seconds = 0.0;
};

/// Runs one check of the config by name.
CheckOutcome run_check(const ExperimentConfig& config, const std::string& name);

/// Runs every enabled check in order. `progress` is called after each check.
SuiteResult run_suite(const ExperimentConfig& config,
                      const std::function<void(const CheckOutcome&, double seconds)>& progress = {});

}  // namespace spinelab
