#include "spinelab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "spinelab/numfmt.hpp"
#include "spinelab/rng.hpp"

namespace spinelab {

using nlohmann::json;

std::string Constraint::text() const {
  switch (kind) {
    case Kind::none: return "";
    case Kind::gt: return "> " + format_double(bound);
    case Kind::ge: return ">= " + format_double(bound);
    case Kind::bounded_functional: return "bounded functional name";
    case Kind::one_of: {
      std::string s = "one of";
      for (const auto& c : choices) s += " " + c;
      return s;
    }
    case Kind::increasing_at_least:
      return "strictly increasing, non-negative, at least " + format_double(bound) + " entries";
    case Kind::increasing_positive: return "strictly increasing, positive, non-empty";
    case Kind::positive_list: return "non-empty, every entry > 0";
    case Kind::nonnegative_list: return "non-empty, every entry >= 0";
    case Kind::moment_orders: return "non-empty, entries -1 or >= 1";
  }
  return "";
}

namespace {

const char* type_name(const double&) { return "number"; }
const char* type_name(const std::uint64_t&) { return "unsigned integer"; }
const char* type_name(const bool&) { return "boolean"; }
const char* type_name(const std::string&) { return "string"; }
const char* type_name(const std::vector<double>&) { return "array of numbers"; }
const char* type_name(const std::vector<int>&) { return "array of integers"; }

// Returns an empty string when the value satisfies the constraint.
std::string violation(const Constraint& c, double v) {
  if (!std::isfinite(v)) return "must be finite";
  if (c.kind == Constraint::Kind::gt && !(v > c.bound)) return "must be " + c.text();
  if (c.kind == Constraint::Kind::ge && !(v >= c.bound)) return "must be " + c.text();
  return "";
}

std::string violation(const Constraint& c, const std::string& v) {
  if (c.kind == Constraint::Kind::bounded_functional) {
    try {
      if (!make_functional(v).bounded()) return "functional '" + v + "' is unbounded";
    } catch (const std::invalid_argument& e) {
      return e.what();
    }
  }
  if (c.kind == Constraint::Kind::one_of) {
    for (const auto& choice : c.choices) {
      if (v == choice) return "";
    }
    return "must be " + c.text();
  }
  return "";
}

template <class T>
std::string violation(const Constraint& c, const std::vector<T>& v) {
  using K = Constraint::Kind;
  if (c.kind == K::none) return "";
  if (v.empty()) return "must be " + c.text();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = static_cast<double>(v[i]);
    bool ok = std::isfinite(x);
    switch (c.kind) {
      case K::increasing_at_least: ok = ok && x >= 0.0 && (i == 0 || x > static_cast<double>(v[i - 1])); break;
      case K::increasing_positive: ok = ok && x > 0.0 && (i == 0 || x > static_cast<double>(v[i - 1])); break;
      case K::positive_list: ok = ok && x > 0.0; break;
      case K::nonnegative_list: ok = ok && x >= 0.0; break;
      case K::moment_orders: ok = ok && (x == -1.0 || x >= 1.0); break;
      default: break;
    }
    if (!ok) return "must be " + c.text();
  }
  if (c.kind == K::increasing_at_least && v.size() < static_cast<std::size_t>(c.bound)) return "must be " + c.text();
  return "";
}

std::string violation(const Constraint& c, std::uint64_t v) { return violation(c, static_cast<double>(v)); }
std::string violation(const Constraint&, bool) { return ""; }

template <class T>
T read_value(const json& j, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!j.is_number()) throw ConfigError(key, "expected a number");
      return j.get<double>();
    } else if constexpr (std::is_same_v<T, std::uint64_t> || std::is_same_v<T, unsigned>) {
      if (j.is_number_unsigned()) return static_cast<T>(j.get<std::uint64_t>());
      if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<T>(j.get<std::int64_t>());
      if (j.is_number_float()) {
        const double d = j.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<T>(d);
      }
      throw ConfigError(key, "expected a non-negative integer");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!j.is_boolean()) throw ConfigError(key, "expected true or false");
      return j.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!j.is_string()) throw ConfigError(key, "expected a string");
      return j.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!j.is_array()) throw ConfigError(key, "expected an array of numbers");
      std::vector<double> out;
      for (const auto& e : j) {
        if (!e.is_number()) throw ConfigError(key, "expected an array of numbers");
        out.push_back(e.get<double>());
      }
      return out;
    } else {
      static_assert(std::is_same_v<T, std::vector<int>>);
      if (!j.is_array()) throw ConfigError(key, "expected an array of integers");
      std::vector<int> out;
      for (const auto& e : j) {
        if (!e.is_number_integer()) throw ConfigError(key, "expected an array of integers");
        out.push_back(e.get<int>());
      }
      return out;
    }
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

class Reader : public ConstraintFactory {
 public:
  Reader(const json& obj, std::string prefix) : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object()) throw ConfigError(prefix_, "expected an object");
  }

  template <class T>
  void field(const char* name, T& ref, const char*, const Constraint& c = {}) {
    seen_.insert(name);
    const std::string key = prefix_ + "." + name;
    const auto it = obj_.find(name);
    if (it != obj_.end()) ref = read_value<T>(*it, key);
    const std::string err = violation(c, ref);
    if (!err.empty()) throw ConfigError(key, err);
  }

  void allow(const char* name) { seen_.insert(name); }

  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.count(k)) throw ConfigError(prefix_ + "." + k, "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

class Writer : public ConstraintFactory {
 public:
  explicit Writer(json& out) : out_(out) {}
  template <class T>
  void field(const char* name, T& ref, const char*, const Constraint& = {}) {
    out_[name] = ref;
  }

 private:
  json& out_;
};

class SchemaWriter : public ConstraintFactory {
 public:
  explicit SchemaWriter(json& out) : out_(out) {}
  template <class T>
  void field(const char* name, T& ref, const char* description, const Constraint& c = {}) {
    json entry{{"type", type_name(ref)}, {"default", ref}, {"description", description}};
    if (c.kind != Constraint::Kind::none) entry["constraint"] = c.text();
    out_[name] = std::move(entry);
  }

 private:
  json& out_;
};

const json& member_or_empty(const json& obj, const char* key) {
  static const json empty = json::object();
  const auto it = obj.find(key);
  return it == obj.end() ? empty : *it;
}

std::vector<std::pair<double, double>> zip_knots(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size()) throw ConfigError("model.environment.values", "must have as many entries as times");
  std::vector<std::pair<double, double>> knots;
  for (std::size_t i = 0; i < t.size(); ++i) knots.emplace_back(t[i], v[i]);
  return knots;
}

void visit_environment(EnvironmentSpec& env, const json& obj) {
  Reader r(obj, "model.environment");
  r.field("type", env.type, "", ConstraintFactory::one_of({"constant", "sinusoidal", "tabulated"}));
  if (env.type == "constant") {
    r.field("value", env.value, "", ConstraintFactory::gt(0));
  } else if (env.type == "sinusoidal") {
    r.field("alpha", env.alpha, "");
    r.field("beta", env.beta, "");
    if (!(env.alpha - std::abs(env.beta) > 0.0)) {
      throw ConfigError("model.environment", "sinusoidal profile needs alpha - |beta| > 0");
    }
  } else {
    r.field("times", env.times, "", ConstraintFactory::increasing_at_least(1));
    r.field("values", env.values, "", ConstraintFactory::positive_list());
    zip_knots(env.times, env.values);
  }
  r.finish();
}

json environment_json(const EnvironmentSpec& env) {
  if (env.type == "constant") return {{"type", env.type}, {"value", env.value}};
  if (env.type == "sinusoidal") return {{"type", env.type}, {"alpha", env.alpha}, {"beta", env.beta}};
  return {{"type", env.type}, {"times", env.times}, {"values", env.values}};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError(path, "empty path segment");
    parts.push_back(part);
  }
  if (parts.empty()) throw ConfigError(path, "empty key");
  return parts;
}

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

bool all_at_most(const std::vector<double>& v, double hi) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x <= hi; });
}

void validate_cross_fields(const CheckSettings& s) {
  for (double x : s.drift.s_grid) {
    require(x + s.drift.h <= s.drift.t, "checks.drift.s_grid", "every s must satisfy s + h <= t");
  }
  require(all_at_most(s.semigroup_drift.s_grid, s.semigroup_drift.t), "checks.semigroup_drift.s_grid",
          "every s must be <= t");
  require(all_at_most(s.moments.s_grid, s.moments.t), "checks.moments.s_grid", "every s must be <= t");
  require(s.martingale.r <= s.martingale.s && s.martingale.s <= s.martingale.t, "checks.martingale",
          "requires r <= s <= t");
  require(s.kernel_sampler.s <= s.kernel_sampler.t, "checks.kernel_sampler", "requires s <= t");
}

}  // namespace

EnvironmentProfile EnvironmentSpec::build() const {
  if (type == "constant") return EnvironmentProfile::constant(value);
  if (type == "sinusoidal") return EnvironmentProfile::sinusoidal(alpha, beta);
  return EnvironmentProfile::tabulated(zip_knots(times, values));
}

ModelParams ExperimentConfig::model() const { return ModelParams(a, epsilon, environment.build()); }

std::vector<std::string> check_names() {
  std::vector<std::string> names;
  CheckSettings s;
  for_each_check(s, [&](const char* name, auto&) { names.emplace_back(name); });
  return names;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected an object");
  ExperimentConfig c;
  static const std::set<std::string> top{"name", "model", "seed", "workers", "output_dir", "checks"};
  for (const auto& [k, v] : doc.items()) {
    if (!top.count(k)) throw ConfigError(k, "unknown key");
  }
  if (doc.contains("name")) c.name = read_value<std::string>(doc["name"], "name");
  if (doc.contains("seed")) c.seed = read_value<std::uint64_t>(doc["seed"], "seed");
  if (doc.contains("workers")) c.workers = read_value<unsigned>(doc["workers"], "workers");
  if (doc.contains("output_dir")) c.output_dir = read_value<std::string>(doc["output_dir"], "output_dir");

  const json& model = member_or_empty(doc, "model");
  {
    Reader r(model, "model");
    r.field("a", c.a, "", ConstraintFactory::gt(0));
    r.field("epsilon", c.epsilon, "");
    if (!(c.epsilon > 0.0 && c.epsilon < 0.5)) {
      throw ConfigError("model.epsilon", "ε ∈ (0, 1/2) required (got " + format_double(c.epsilon) + ")");
    }
    r.allow("environment");
    r.finish();
    visit_environment(c.environment, member_or_empty(model, "environment"));
  }
  try {
    (void)c.model();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model", e.what());
  }

  const json& checks = member_or_empty(doc, "checks");
  if (!checks.is_object()) throw ConfigError("checks", "expected an object");
  const auto names = check_names();
  for (const auto& [k, v] : checks.items()) {
    if (std::find(names.begin(), names.end(), k) == names.end()) throw ConfigError("checks." + k, "unknown check");
  }
  for_each_check(c.checks, [&](const char* name, auto& cfg) {
    const std::string prefix = std::string("checks.") + name;
    const json& block = member_or_empty(checks, name);
    Reader r(block, prefix);
    cfg.visit(r);
    bool enabled = true;
    r.field("enabled", enabled, "");
    r.finish();
    if (enabled) c.enabled.emplace_back(name);
  });
  validate_cross_fields(c.checks);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["name"] = c.name;
  doc["seed"] = c.seed;
  doc["workers"] = c.workers;
  doc["output_dir"] = c.output_dir;
  doc["model"] = {{"a", c.a}, {"epsilon", c.epsilon}, {"environment", environment_json(c.environment)}};
  json checks = json::object();
  CheckSettings copy = c.checks;
  for_each_check(copy, [&](const char* name, auto& cfg) {
    json block = json::object();
    Writer w(block);
    cfg.visit(w);
    block["enabled"] = std::find(c.enabled.begin(), c.enabled.end(), name) != c.enabled.end();
    checks[name] = std::move(block);
  });
  doc["checks"] = std::move(checks);
  return doc;
}

std::string config_hash(const ExperimentConfig& c) {
  json doc = to_json(c);
  // Where results go and how many threads compute them do not change them.
  doc.erase("output_dir");
  doc.erase("workers");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash_name(doc.dump())));
  return buf;
}

json read_config_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(assignment, "override must look like key.path=value");
  const auto parts = split_path(assignment.substr(0, eq));
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError(assignment.substr(0, eq), "path crosses a non-object value");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  if (!node->is_object()) throw ConfigError(assignment.substr(0, eq), "path crosses a non-object value");
  (*node)[parts.back()] = std::move(value);
}

void apply_replicas(json& doc, std::uint64_t n) {
  CheckSettings s;
  for_each_check(s, [&](const char* name, auto& cfg) {
    json block = json::object();
    Writer w(block);
    cfg.visit(w);
    if (!block.contains("n")) return;
    // growth_rate's Monte Carlo rows are opt-in; keep them off unless asked.
    if (std::string(name) == "growth_rate") return;
    doc["checks"][name]["n"] = n;
  });
}

void restrict_checks(json& doc, const std::vector<std::string>& names) {
  const auto all = check_names();
  for (const auto& n : names) {
    if (std::find(all.begin(), all.end(), n) == all.end()) throw ConfigError("--check " + n, "unknown check");
  }
  for (const auto& n : all) {
    const bool on = std::find(names.begin(), names.end(), n) != names.end();
    doc["checks"][n]["enabled"] = on;
  }
}

json config_schema() {
  json schema;
  ExperimentConfig c;
  schema["name"] = {{"type", "string"}, {"default", c.name}, {"description", "experiment name"}};
  schema["seed"] = {{"type", "unsigned integer"}, {"default", c.seed}, {"description", "global seed"}};
  schema["workers"] = {
      {"type", "unsigned integer"}, {"default", c.workers}, {"description", "worker threads (0 = all cores)"}};
  schema["output_dir"] = {{"type", "string"}, {"default", c.output_dir}, {"description", "artifact directory"}};
  schema["model"] = {
      {"a", {{"type", "number"}, {"default", c.a}, {"constraint", "> 0"}, {"description", "growth rate"}}},
      {"epsilon",
       {{"type", "number"}, {"default", c.epsilon}, {"constraint", "ε ∈ (0, 1/2)"}, {"description", "split margin"}}},
      {"environment",
       {{"type", {{"type", "string"}, {"default", "constant"}, {"constraint", "one of constant sinusoidal tabulated"}}},
        {"value", {{"type", "number"}, {"constraint", "> 0"}, {"description", "constant: phi"}}},
        {"alpha", {{"type", "number"}, {"description", "sinusoidal: phi = alpha + beta sin(t), alpha > |beta|"}}},
        {"beta", {{"type", "number"}, {"description", "sinusoidal amplitude"}}},
        {"times", {{"type", "array of numbers"}, {"description", "tabulated: knot times, increasing"}}},
        {"values",
         {{"type", "array of numbers"}, {"description", "tabulated: positive knot values, linear in between"}}}}}};
  json checks;
  for_each_check(c.checks, [&](const char* name, auto& cfg) {
    json block;
    SchemaWriter w(block);
    cfg.visit(w);
    block["enabled"] = {{"type", "boolean"}, {"default", true}, {"description", "run this check"}};
    checks[name] = std::move(block);
  });
  schema["checks"] = std::move(checks);
  return schema;
}

}  // namespace spinelab
