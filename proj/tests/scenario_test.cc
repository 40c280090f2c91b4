// Copyright 2026 The Shopbot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shopbot/scenario.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

namespace shopbot {
namespace {

namespace fs = std::filesystem;
const fs::path kScenarios = fs::path(SHOPBOT_TEST_DATA) / "scenarios";

std::string error_of(std::string_view json) {
  try {
    parse_scenario(json);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST_CASE("price war scenario loads") {
  const ScenarioConfig c = load_scenario(kScenarios / "price_war.json");
  CHECK(c.has_sellers);
  CHECK(c.ticks == 5000);
  CHECK(c.seed == 7);
  CHECK(c.simulation.market.num_sellers == 2);
  CHECK(c.simulation.market.type1_fraction == 0.75);
  CHECK(std::holds_alternative<MyopicOptimal>(c.simulation.sellers[0].strategy));
  CHECK_FALSE(c.traffic.has_value());
}

TEST_CASE("seller fields map onto grid ticks") {
  const ScenarioConfig c = parse_scenario(R"({
    "price_tick": 0.05, "price_max": 2.0, "valuation": {"kind": "uniform", "lo": 0.5, "hi": 1.5},
    "sellers": [
      {"cost": 0.1, "strategy": "fixed", "price": 0.75, "update_weight": 0.5},
      {"cost": 0.2, "strategy": "derivative", "step": 0.1, "direction": 1, "sampled_profit": true,
       "initial_price": 1.0}
    ],
    "type1_fraction_end": 0.1,
    "detectors": {"min_drop_run": 4, "min_reset": 0.3, "window": 50, "margin": 0.1, "cv_max": 0.1}
  })");
  REQUIRE(c.simulation.sellers.size() == 2);
  const SellerSpec& fixed = c.simulation.sellers[0];
  CHECK(fixed.marginal_cost == 2);
  CHECK(std::get<FixedStrategy>(fixed.strategy).price == 15);
  CHECK(fixed.update_weight == 0.5);
  const SellerSpec& df = c.simulation.sellers[1];
  const auto& d = std::get<DerivativeFollower>(df.strategy);
  CHECK(d.step == 2);
  CHECK(d.direction == 1);
  CHECK(d.sampled_profit);
  CHECK(df.initial_price == 20);
  CHECK(c.simulation.type1_fraction_end == 0.1);
  CHECK(c.simulation.detectors.min_drop_run == 4);
  CHECK(c.simulation.detectors.window == 50);
  CHECK(std::holds_alternative<UniformValuation>(c.simulation.market.valuation));
}

TEST_CASE("validation errors name the field") {
  CHECK(error_of(R"({"type1_fraction": 1.7, "sellers": [{}]})").rfind("type1_fraction:", 0) == 0);
  CHECK(error_of(R"({"colour": 1})").rfind("colour: unknown key", 0) == 0);
  CHECK(error_of(R"({"sellers": [{"cost": 0, "shade": 2}]})").rfind("sellers[0].shade", 0) == 0);
  CHECK(error_of(R"({"sellers": [{"cost": 0.005}]})").rfind("sellers[0].cost", 0) == 0);
  CHECK(error_of(R"({"sellers": [{"strategy": "fixed"}]})").rfind("sellers[0].price", 0) == 0);
  CHECK(error_of(R"({"sellers": [{"strategy": "psychic"}]})").rfind("sellers[0].strategy", 0) == 0);
  CHECK(error_of(R"({"sellers": [{"strategy": "myopic", "step": 0.01}]})").rfind("sellers[0].step", 0) == 0);
  CHECK(error_of(R"({"sellers": [{"strategy": "derivative", "direction": 2}]})").rfind("sellers[0].direction", 0) == 0);
  CHECK(error_of(R"({"sellers": [{}], "num_sellers": 3})").rfind("num_sellers", 0) == 0);
  CHECK(error_of(R"({"sellers": []})").rfind("sellers", 0) == 0);
  CHECK(error_of(R"({"ticks": 0})").rfind("ticks", 0) == 0);
  CHECK(error_of(R"({"seed": -1})").rfind("seed", 0) == 0);
  CHECK(error_of(R"({"buyers_per_tick": "many"})").rfind("buyers_per_tick: expected an integer", 0) == 0);
  CHECK(error_of(R"({"valuation": {"kind": "normal"}})").rfind("valuation.kind", 0) == 0);
  CHECK(error_of(R"({"valuation": {"kind": "uniform", "lo": 0.8, "hi": 0.2}})").rfind("valuation.hi", 0) == 0);
  CHECK(error_of(R"({"detectors": {"window": 0}, "sellers": [{}]})").rfind("detectors.window", 0) == 0);
  CHECK(error_of(R"({"traffic": {"threshold": 0}})").rfind("traffic.threshold", 0) == 0);
  CHECK(error_of(R"({"traffic": {"agents": [{"id": "a"}]}})").rfind("traffic.agents[0].origin", 0) == 0);
  CHECK(error_of(R"({"traffic": {"agents": [{"id": "a", "origin": "x", "paths": "/"}]}})")
            .rfind("traffic.agents[0].paths", 0) == 0);
  CHECK(error_of(R"({"traffic": {"metasite": {"refresh_period": 0}}})").rfind("traffic.metasite", 0) == 0);
  CHECK(error_of("{").rfind("(root): invalid JSON", 0) == 0);
  CHECK(error_of("[1, 2]").rfind("(root): expected an object", 0) == 0);
}

TEST_CASE("traffic scenario with a policy file") {
  const ScenarioConfig c = load_scenario(kScenarios / "traffic_metasite.json");
  REQUIRE(c.traffic.has_value());
  REQUIRE(c.traffic->policy.has_value());
  CHECK(c.traffic->policy->records.size() == 1);
  CHECK(c.traffic->agents.size() == 2);
  CHECK(c.traffic->agents[0].compliant);
  CHECK(c.traffic->agents[0].paths.size() == 2);
  REQUIRE(c.traffic->metasite.has_value());
  CHECK(c.traffic->metasite->refresh_period == 24);
  CHECK(c.traffic->load_window == 24);
}

TEST_CASE("metasite refresh may be disabled") {
  const ScenarioConfig c = parse_scenario(R"({"traffic": {"metasite": {"refresh_period": null}}})");
  CHECK_FALSE(c.traffic->metasite->refresh_period.has_value());
}

TEST_CASE("missing files are I/O errors") {
  CHECK_THROWS_AS(load_scenario(kScenarios / "does_not_exist.json"), IoError);
  CHECK_THROWS_AS(parse_scenario(R"({"policy_file": "nowhere.txt"})", kScenarios), IoError);
}

TEST_CASE("malformed policy files are config errors") {
  const fs::path dir = fs::temp_directory_path() / "shopbot_scenario_test";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "bad.txt") << "User-agent: *\nCrawl-limit: nope\n";
  }
  CHECK_THROWS_WITH_AS(parse_scenario(R"({"policy_file": "bad.txt"})", dir),
                       doctest::Contains("line 2"), ConfigError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace shopbot
