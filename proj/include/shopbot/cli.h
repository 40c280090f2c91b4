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

// Command-line front end. Each command returns its process exit code:
//   0 success / ALLOW, 2 invalid config, policy or usage, 3 I/O failure,
//   4 DENY, 5 THROTTLE.
// Artifacts never carry timestamps, so reruns are byte-identical.

#ifndef SHOPBOT_CLI_H_
#define SHOPBOT_CLI_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "shopbot/exclusion_protocol.h"
#include "shopbot/price_grid.h"
#include "shopbot/sim_engine.h"
#include "shopbot/traffic_defense.h"

namespace shopbot::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitDeny = 4;
inline constexpr int kExitThrottle = 5;

struct SimulateOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> ticks;
  // When non-empty, each config runs in parallel into out_dir/<stem>.
  std::vector<std::filesystem::path> sweep;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct CheckOptions {
  std::filesystem::path policy;
  std::string agent;
  std::string path = "/";
  std::string purpose;
  // CSV "time,agent,path,purpose,fraction" replayed before the request.
  std::optional<std::filesystem::path> history;
  // Defaults to the last history time, or 0.
  std::optional<std::int64_t> time;
  double fraction = 0.0;
  // By default every agent is taken to have fetched the policy first.
  bool unassented = false;
};

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int cmd_robots_parse(const std::filesystem::path& policy, std::ostream& out, std::ostream& err);
int cmd_robots_check(const CheckOptions& options, std::ostream& out, std::ostream& err);
int cmd_traffic(const std::filesystem::path& config, const std::filesystem::path& out_dir,
                std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Artifact renderers, exposed for tests.
std::string prices_csv(const RunResult& result, const PriceGrid& grid);
std::string summary_json(const RunResult& result);
std::string events_csv(const TrafficResult& result);
std::string load_json(const TrafficResult& result);
std::string decision_json(const AccessDecision& decision);

}  // namespace shopbot::cli

#endif  // SHOPBOT_CLI_H_
