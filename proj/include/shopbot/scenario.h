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

// JSON scenario files for the command-line harness. A scenario is a single
// flat JSON object; unknown keys are rejected and every validation error
// names the offending field.
//
//   {
//     "buyers_per_tick": 100, "type1_fraction": 0.75,
//     "valuation": {"kind": "constant", "value": 1.0},
//     "price_tick": 0.01, "price_max": 1.0,
//     "sellers": [{"cost": 0.0, "strategy": "myopic"}, ...],
//     "ticks": 5000, "seed": 7,
//     "detectors": {"min_drop_run": 3, "window": 500, ...},
//     "traffic": {...}, "policy_file": "robots.txt"
//   }

#ifndef SHOPBOT_SCENARIO_H_
#define SHOPBOT_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "shopbot/sim_engine.h"
#include "shopbot/traffic_defense.h"

namespace shopbot {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads a whole file; throws IoError.
std::string read_file(const std::filesystem::path& path);

struct ScenarioConfig {
  SimulationConfig simulation;
  bool has_sellers = false;
  std::int64_t ticks = 1000;
  std::uint64_t seed = 0;
  std::optional<TrafficScenario> traffic;
  std::optional<std::filesystem::path> policy_file;
};

// Parses and validates a scenario. Relative policy_file paths resolve
// against `base_dir`, and the policy is loaded into traffic.policy. Throws
// ConfigError on any schema or validation problem and IoError when the
// policy file cannot be read.
ScenarioConfig parse_scenario(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});

ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace shopbot

#endif  // SHOPBOT_SCENARIO_H_
