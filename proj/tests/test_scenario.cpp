#include <sepgroup.hpp>
#include <sepgroup/runner.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <string>

using sepg::json;

namespace {

std::vector<std::string> bundled() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(SEPG_SCENARIO_DIR))
    if (e.path().extension() == ".json") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string parse_message(const json& j) {
  try {
    sepg::parse_scenario(j);
  } catch (const sepg::parse_error& e) {
    return e.what();
  }
  return "";
}

const json base = json::parse(R"({
  "name": "t", "alpha": "w^3", "depth": 4,
  "systems": {"s": {"alpha": "w^3", "ladders": [{"delta": "w^2*1", "simple": true, "explore": 8}]}},
  "configs": {"c": {"system": "s", "psi": "factorial", "coeffs": [[1]]}},
  "colorings": {"k": [{"delta": "w^2*1", "colors": [0, 1, 0, 1, 0, 1]}]},
  "checks": [{"name": "b", "kind": "build", "config": "c"}]
})");

TEST(ScenarioParse, ErrorsCarryLocations) {
  json j = base;
  j["alpha"] = "w^2+w^3";
  EXPECT_EQ(parse_message(j).rfind("/alpha:", 0), 0u) << parse_message(j);

  j = base;
  j["checks"][0]["config"] = "missing";
  EXPECT_NE(parse_message(j).find("/checks/0/config: unknown config 'missing'"), std::string::npos);

  j = base;
  j["checks"].push_back(j["checks"][0]);
  EXPECT_NE(parse_message(j).find("duplicate check name 'b'"), std::string::npos);

  j = base;
  j["checks"][0].erase("kind");
  EXPECT_NE(parse_message(j).find("/checks/0: missing field 'kind'"), std::string::npos);

  j = base;
  j["systems"]["s"]["ladders"][0]["delta"] = "w+1";
  EXPECT_NE(parse_message(j).find("/systems/s"), std::string::npos);

  EXPECT_NE(parse_message(json::array()).find("/:"), std::string::npos);
  EXPECT_TRUE(parse_message(base).empty());
}

TEST(ScenarioParse, MissingFileIsAParseError) {
  EXPECT_THROW(sepg::load_scenario("/nonexistent/scenario.json"), sepg::parse_error);
}

TEST(ScenarioRun, ExpectErrorInvertsTheVerdict) {
  json j = base;
  j["checks"].push_back({{"name", "too-deep"}, {"kind", "twisted"}, {"config", "c"},
                         {"coloring", "k"}, {"depth", 9}, {"expect", "error"}});
  const auto report = sepg::run_scenario(sepg::parse_scenario(j));
  EXPECT_TRUE(report.at("passed").get<bool>()) << report.dump(2);
  EXPECT_TRUE(report.at("checks")[1].contains("error"));

  j["checks"][1]["depth"] = 3;
  const auto again = sepg::run_scenario(sepg::parse_scenario(j));
  EXPECT_FALSE(again.at("passed").get<bool>());
  EXPECT_NE(again.at("summary").get<std::string>().find("too-deep"), std::string::npos);
}

TEST(ScenarioRun, KindFilterSelectsChecks) {
  sepg::run_options opt;
  opt.kinds = sepg::verb_kinds("obstruct");
  json j = base;
  j["checks"].push_back({{"name", "tw"}, {"kind", "twisted"}, {"config", "c"}, {"coloring", "k"}});
  const auto report = sepg::run_scenario(sepg::parse_scenario(j), opt);
  ASSERT_EQ(report.at("checks").size(), 1u);
  EXPECT_EQ(report.at("checks")[0].at("module"), "whitehead");
}

TEST(ScenarioManifest, BundledScenariosCoverEveryModule) {
  const std::set<std::string> modules{"ladder", "group_core", "group_construction", "filtration_equiv",
                                      "whitehead"};
  const auto files = bundled();
  ASSERT_GE(files.size(), 2u);
  for (const auto& f : files) {
    const auto sc = sepg::load_scenario(f);
    ASSERT_TRUE(sc.alpha.has_value()) << f;
    std::set<std::string> seen;
    for (const auto& c : sc.checks) {
      const auto kind = c.at("kind").get<std::string>();
      ASSERT_TRUE(sepg::check_modules().count(kind)) << f << ": " << kind;
      seen.insert(sepg::check_modules().at(kind));
    }
    EXPECT_EQ(seen, modules) << f;
  }
}

TEST(ScenarioManifest, BundledScenariosPassDeterministically) {
  for (const auto& f : bundled()) {
    const auto a = sepg::run_scenario(sepg::load_scenario(f)).dump(2);
    const auto b = sepg::run_scenario(sepg::load_scenario(f)).dump(2);
    EXPECT_EQ(a, b) << f;
    EXPECT_TRUE(json::parse(a).at("passed").get<bool>()) << f;
  }
}

TEST(ScenarioManifest, ParityVerdictIsObstructed) {
  const auto report = sepg::run_scenario(sepg::load_scenario(std::string(SEPG_SCENARIO_DIR) + "/parity-obstruction.json"));
  bool found = false;
  for (const auto& c : report.at("checks"))
    if (c.at("kind") == "obstruct") {
      found = true;
      EXPECT_EQ(c.at("verdict"), "OBSTRUCTED");
      EXPECT_EQ(c.at("witness"), "2*Delta = -1");
    }
  EXPECT_TRUE(found);
}

}  // namespace
