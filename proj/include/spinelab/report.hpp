#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "spinelab/config.hpp"
#include "spinelab/suite.hpp"

namespace spinelab {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// CSV with header
///   check_name,param_point,t,estimate,std_error,bound_or_target,outcome,n,seed
/// Numbers use the shortest round-trip decimal form; no timestamps, so the
/// body is a function of (config, seed) only.
void write_check_csv(std::ostream& os, const CheckOutcome& outcome);

/// Machine-readable summary of all outcomes, including decay fits.
nlohmann::json summary_json(const ExperimentConfig& config, const SuiteResult& result);

/// Human-readable summary, one line per check.
void write_summary_text(std::ostream& os, const ExperimentConfig& config, const SuiteResult& result);

/// Flat key=value manifest: toolkit_version, config_hash, seed, per-check
/// seeds and outcomes, wall-clock seconds.
void write_manifest(std::ostream& os, const ExperimentConfig& config, const SuiteResult& result);

/// Writes <check>.csv for every outcome plus summary.json, summary.txt,
/// manifest.txt and resolved_config.json into `dir` (created if missing).
void write_run_artifacts(const std::filesystem::path& dir, const ExperimentConfig& config, const SuiteResult& result);

/// 0 all pass, 2 inconclusive without failures, 1 any failure.
int exit_code_for(Verdict overall);

}  // namespace spinelab
