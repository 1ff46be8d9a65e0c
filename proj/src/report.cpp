#include "spinelab/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "spinelab/numfmt.hpp"

namespace spinelab {

using nlohmann::json;

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json number(double v) {
  // JSON has no NaN or infinity.
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_check_csv(std::ostream& os, const CheckOutcome& outcome) {
  os << "check_name,param_point,t,estimate,std_error,bound_or_target,outcome,n,seed\n";
  for (const Measurement& m : outcome.rows) {
    os << outcome.name << ',' << csv_field(m.param_point) << ',' << format_double(m.t) << ','
       << format_double(m.estimate) << ',' << format_double(m.std_error) << ',' << format_double(m.bound_or_target)
       << ',' << verdict_name(m.outcome) << ',' << m.n << ',' << outcome.seed << '\n';
  }
}

json summary_json(const ExperimentConfig& config, const SuiteResult& result) {
  json checks = json::array();
  for (const CheckOutcome& o : result.outcomes) {
    json entry{{"name", o.name},
               {"outcome", verdict_name(o.verdict)},
               {"seed", o.seed},
               {"replicas", o.replicas},
               {"detail", o.detail},
               {"rows", o.rows.size()}};
    if (o.fit) {
      json grid = json::array();
      for (const auto& g : o.fit->grid) grid.push_back({{"t", g.t}, {"value", number(g.value)}, {"std_error", number(g.std_error)}});
      entry["fit"] = {{"grid", grid},
                      {"valid", o.fit->valid},
                      {"slope", number(o.fit->slope)},
                      {"slope_ci", {number(o.fit->slope_ci_low), number(o.fit->slope_ci_high)}},
                      {"intercept", number(o.fit->intercept)}};
    }
    checks.push_back(std::move(entry));
  }
  return {{"name", config.name},
          {"config_hash", config_hash(config)},
          {"seed", config.seed},
          {"overall", verdict_name(result.overall)},
          {"checks", checks}};
}

void write_summary_text(std::ostream& os, const ExperimentConfig& config, const SuiteResult& result) {
  os << "experiment " << config.name << " (config " << config_hash(config) << ", seed " << config.seed << ")\n";
  for (const CheckOutcome& o : result.outcomes) {
    std::string name = o.name;
    name.resize(16, ' ');
    std::string verdict = verdict_name(o.verdict);
    verdict.resize(13, ' ');
    os << name << verdict << o.detail << '\n';
  }
  os << "overall: " << verdict_name(result.overall) << '\n';
}

void write_manifest(std::ostream& os, const ExperimentConfig& config, const SuiteResult& result) {
  os << "toolkit_version=" << kToolkitVersion << '\n';
  os << "experiment=" << config.name << '\n';
  os << "config_hash=" << config_hash(config) << '\n';
  os << "seed=" << config.seed << '\n';
  os << "workers=" << config.workers << '\n';
  os << "resolved_config=resolved_config.json\n";
  for (const CheckOutcome& o : result.outcomes) {
    os << "check." << o.name << ".seed=" << o.seed << '\n';
    os << "check." << o.name << ".replicas=" << o.replicas << '\n';
    os << "check." << o.name << ".outcome=" << verdict_name(o.verdict) << '\n';
  }
  os << "overall=" << verdict_name(result.overall) << '\n';
  os << "wall_clock_seconds=" << format_double(result.wall_seconds) << '\n';
}

void write_run_artifacts(const std::filesystem::path& dir, const ExperimentConfig& config, const SuiteResult& result) {
  std::filesystem::create_directories(dir);
  for (const CheckOutcome& o : result.outcomes) {
    auto out = open_out(dir / (o.name + ".csv"));
    write_check_csv(out, o);
  }
  {
    auto out = open_out(dir / "summary.json");
    out << summary_json(config, result).dump(2) << '\n';
  }
  {
    auto out = open_out(dir / "summary.txt");
    write_summary_text(out, config, result);
  }
  {
    auto out = open_out(dir / "manifest.txt");
    write_manifest(out, config, result);
  }
  {
    auto out = open_out(dir / "resolved_config.json");
    out << to_json(config).dump(2) << '\n';
  }
}

int exit_code_for(Verdict overall) {
  switch (overall) {
    case Verdict::pass: return 0;
    case Verdict::fail: return 1;
    case Verdict::inconclusive: return 2;
  }
  return 1;
}

}  // namespace spinelab
