// Command-line front end. Every subcommand is a thin wrapper over the
// library: config loading, the check suite, report writing and the dumps.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinelab/config.hpp"
#include "spinelab/popsim.hpp"
#include "spinelab/report.hpp"
#include "spinelab/spinesim.hpp"
#include "spinelab/suite.hpp"

namespace {

constexpr int kExitConfig = 64;
constexpr int kExitIo = 74;
constexpr int kExitTruncated = 3;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
};

nlohmann::json load_document(const CommonOptions& o) {
  nlohmann::json doc = o.config_path.empty() ? nlohmann::json::object()
                                             : spinelab::read_config_document(o.config_path);
  for (const auto& ov : o.overrides) spinelab::apply_override(doc, ov);
  if (o.seed) doc["seed"] = *o.seed;
  return doc;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--override", o.overrides, "key.path=value (repeatable)");
  cmd->add_option("--seed", o.seed, "global seed");
}

std::ostream* open_dump(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  return &file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and Monte Carlo verification for a growth-fragmentation branching process"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::optional<std::uint64_t> replicas;
  std::optional<unsigned> workers;
  std::string out_dir;
  std::vector<std::string> only_checks;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "run the check suite and write CSVs, summary and manifest");
  add_common(run, run_opts);
  run->add_option("--replicas", replicas, "replica budget n for every Monte Carlo check");
  run->add_option("--workers", workers, "worker threads (0 = all cores)");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--check", only_checks, "run only this check (repeatable)");
  run->add_flag("--quiet", quiet, "no progress lines");

  CommonOptions pop_opts;
  double pop_x0 = 1.0, pop_horizon = 1.5;
  std::size_t pop_cap = 100'000;
  std::string pop_dump;
  auto* pop = app.add_subcommand("simulate-population", "simulate one forest and dump its genealogy");
  add_common(pop, pop_opts);
  pop->add_option("--x0", pop_x0, "root size")->check(CLI::PositiveNumber);
  pop->add_option("--horizon", pop_horizon, "time horizon")->check(CLI::NonNegativeNumber);
  pop->add_option("--cap", pop_cap, "maximum number of individuals")->check(CLI::PositiveNumber);
  pop->add_option("--dump", pop_dump, "output file (default stdout)");

  CommonOptions sp_opts;
  double sp_x0 = 1.0, sp_t = 1.0;
  std::size_t sp_paths = 1;
  std::string sp_dump;
  auto* sp = app.add_subcommand("simulate-spine", "simulate spine paths and dump their jumps");
  add_common(sp, sp_opts);
  sp->add_option("--x0", sp_x0, "start size")->check(CLI::PositiveNumber);
  sp->add_option("--t", sp_t, "terminal time")->check(CLI::NonNegativeNumber);
  sp->add_option("--paths", sp_paths, "number of paths")->check(CLI::PositiveNumber);
  sp->add_option("--dump", sp_dump, "output file (default stdout)");

  auto* list = app.add_subcommand("list-checks", "list the checks of the suite");
  auto* schema = app.add_subcommand("print-config-schema", "print every config key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*list) {
      for (const auto& c : spinelab::check_registry()) std::cout << c.name << "\t" << c.description << "\n";
      return 0;
    }
    if (*schema) {
      std::cout << spinelab::config_schema().dump(2) << "\n";
      return 0;
    }
    if (*run) {
      nlohmann::json doc = load_document(run_opts);
      if (replicas) spinelab::apply_replicas(doc, *replicas);
      if (workers) doc["workers"] = *workers;
      if (!out_dir.empty()) doc["output_dir"] = out_dir;
      if (!only_checks.empty()) spinelab::restrict_checks(doc, only_checks);
      const spinelab::ExperimentConfig config = spinelab::parse_config(doc);
      const auto result = spinelab::run_suite(config, [&](const spinelab::CheckOutcome& o, double secs) {
        if (!quiet) {
          std::cerr << o.name << ": " << spinelab::verdict_name(o.verdict) << " (" << secs << " s) " << o.detail
                    << "\n";
        }
      });
      spinelab::write_run_artifacts(config.output_dir, config, result);
      spinelab::write_summary_text(std::cout, config, result);
      return spinelab::exit_code_for(result.overall);
    }
    if (*pop) {
      const auto config = spinelab::parse_config(load_document(pop_opts));
      const auto params = config.model();
      const auto forest = spinelab::simulate_forest(params, pop_x0, pop_horizon, config.seed, {pop_cap});
      std::ofstream file;
      spinelab::write_forest_dump(*open_dump(pop_dump, file), forest, params);
      if (forest.truncated()) {
        std::cerr << "truncated: more than " << pop_cap << " individuals at t=" << *forest.truncation_time() << "\n";
        return kExitTruncated;
      }
      return 0;
    }
    if (*sp) {
      const auto config = spinelab::parse_config(load_document(sp_opts));
      const auto params = config.model();
      std::vector<spinelab::SpinePath> paths;
      for (std::size_t i = 0; i < sp_paths; ++i) {
        paths.push_back(spinelab::simulate_spine(params, sp_x0, sp_t, spinelab::derive_key(config.seed, i)));
      }
      std::ofstream file;
      spinelab::write_spine_dump(*open_dump(sp_dump, file), paths, params, config.seed);
      return 0;
    }
  } catch (const spinelab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
