#include <gtest/gtest.h>

#include "spinelab/config.hpp"
#include "spinelab/suite.hpp"

using namespace spinelab;
using nlohmann::json;

namespace {

std::string error_key(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

std::string error_text(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "<none>";
}

}  // namespace

TEST(Config, DefaultsEnableEveryCheck) {
  const auto c = parse_config(json::object());
  EXPECT_EQ(c.enabled, check_names());
  EXPECT_EQ(c.enabled.size(), check_registry().size());
  EXPECT_EQ(c.a, 1.0);
  EXPECT_EQ(c.epsilon, 0.25);
  EXPECT_EQ(c.model().env().describe(), "constant(1)");
}

TEST(Config, RejectsUnknownKeysWithPath) {
  EXPECT_EQ(error_key(json{{"bogus", 1}}), "bogus");
  EXPECT_EQ(error_key(json{{"model", {{"eps", 0.1}}}}), "model.eps");
  EXPECT_EQ(error_key(json{{"checks", {{"lln", {{"nn", 3}}}}}}), "checks.lln.nn");
  EXPECT_EQ(error_key(json{{"checks", {{"nosuch", json::object()}}}}), "checks.nosuch");
  EXPECT_EQ(error_key(json{{"model", {{"environment", {{"type", "constant"}, {"alpha", 1}}}}}}),
            "model.environment.alpha");
}

TEST(Config, ValidatesModelAndFields) {
  const auto text = error_text(json{{"model", {{"epsilon", 0.6}}}});
  EXPECT_NE(text.find("model.epsilon"), std::string::npos);
  EXPECT_NE(text.find("ε ∈ (0, 1/2)"), std::string::npos);
  EXPECT_EQ(error_key(json{{"model", {{"a", -1}}}}), "model.a");
  EXPECT_EQ(error_key(json{{"model", {{"environment", {{"type", "sinusoidal"}, {"alpha", 1}, {"beta", 2}}}}}}),
            "model.environment");
  EXPECT_EQ(error_key(json{{"checks", {{"mean_count", {{"n", 10}}}}}}), "checks.mean_count.n");
  EXPECT_EQ(error_key(json{{"checks", {{"lln", {{"t_grid", {1, 2}}}}}}}), "checks.lln.t_grid");
  EXPECT_EQ(error_key(json{{"checks", {{"lln", {{"functional", "endpoint_power(2)"}}}}}}), "checks.lln.functional");
  EXPECT_EQ(error_key(json{{"checks", {{"drift", {{"s_grid", {0, 1.98}}}}}}}), "checks.drift.s_grid");
  EXPECT_EQ(error_key(json{{"checks", {{"moments", {{"p_list", {0}}}}}}}), "checks.moments.p_list");
  EXPECT_EQ(error_key(json{{"seed", "x"}}), "seed");
  EXPECT_EQ(error_key(json{{"checks", {{"mean_count", {{"n", 100.5}}}}}}), "checks.mean_count.n");
}

TEST(Config, TabulatedEnvironment) {
  const auto c = parse_config(
      json{{"model", {{"environment", {{"type", "tabulated"}, {"times", {0, 1, 2}}, {"values", {1, 2, 1}}}}}}});
  EXPECT_EQ(c.model().env().upper_bound(), 2.0);
  EXPECT_EQ(error_key(json{{"model",
                            {{"environment", {{"type", "tabulated"}, {"times", {0, 1}}, {"values", {1, 2, 3}}}}}}}),
            "model.environment.values");
}

TEST(Config, RoundTripAndHash) {
  json doc{{"seed", 7}, {"model", {{"epsilon", 0.2}}}, {"checks", {{"lln", {{"enabled", false}}}}}};
  const auto c = parse_config(doc);
  const auto again = parse_config(to_json(c));
  EXPECT_EQ(to_json(again), to_json(c));
  EXPECT_EQ(config_hash(again), config_hash(c));
  EXPECT_EQ(std::count(c.enabled.begin(), c.enabled.end(), "lln"), 0);
  // Spelling out defaults, reordering keys or moving the output does not
  // change the hash; changing a value does.
  json reordered = json::parse(R"({"checks": {"lln": {"enabled": false}}, "model": {"epsilon": 0.2, "a": 1.0},
                                   "seed": 7, "output_dir": "elsewhere", "workers": 3})");
  EXPECT_EQ(config_hash(parse_config(reordered)), config_hash(c));
  doc["seed"] = 8;
  EXPECT_NE(config_hash(parse_config(doc)), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Config, Overrides) {
  json doc = json::object();
  apply_override(doc, "model.epsilon=0.3");
  apply_override(doc, "checks.lln.t_grid=[1,2,3]");
  apply_override(doc, "name=trial run");
  apply_override(doc, "checks.lln.functional=capped_jump_count(4)");
  const auto c = parse_config(doc);
  EXPECT_EQ(c.epsilon, 0.3);
  EXPECT_EQ(c.checks.lln.t_grid, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(c.name, "trial run");
  EXPECT_EQ(c.checks.lln.functional, "capped_jump_count(4)");
  EXPECT_THROW(apply_override(doc, "novalue"), ConfigError);
  EXPECT_THROW(apply_override(doc, "model..a=1"), ConfigError);
  EXPECT_THROW(apply_override(doc, "model.epsilon.b=1"), ConfigError);
}

TEST(Config, ReplicasAndCheckSelection) {
  json doc = json::object();
  apply_replicas(doc, 5000);
  restrict_checks(doc, {"mean_count", "drift"});
  const auto c = parse_config(doc);
  EXPECT_EQ(c.checks.mean_count.n, 5000u);
  EXPECT_EQ(c.checks.lln.n, 5000u);
  EXPECT_EQ(c.checks.growth_rate.n, 0u);
  EXPECT_EQ(c.enabled, (std::vector<std::string>{"mean_count", "drift"}));
  EXPECT_THROW(restrict_checks(doc, {"nope"}), ConfigError);
}

TEST(Config, SchemaListsEveryCheckField) {
  const auto schema = config_schema();
  for (const auto& name : check_names()) ASSERT_TRUE(schema["checks"].contains(name)) << name;
  EXPECT_EQ(schema["checks"]["lln"]["n_spine"]["default"], 8000000);
  EXPECT_TRUE(schema["checks"]["mean_count"]["n"].contains("constraint"));
}

TEST(Suite, SeedsAreDistinctAndStable) {
  EXPECT_NE(check_seed(1, "lln"), check_seed(1, "drift"));
  EXPECT_EQ(check_seed(1, "lln"), check_seed(1, "lln"));
  EXPECT_NE(check_seed(1, "lln"), check_seed(2, "lln"));
}
