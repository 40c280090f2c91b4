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

// Site-side view of robot traffic: per-address rate detection and permanent
// blocking, proxy-induced collateral blocking, robot load accounting, and the
// metasite refresh / vendor-robot query model.

#ifndef SHOPBOT_TRAFFIC_DEFENSE_H_
#define SHOPBOT_TRAFFIC_DEFENSE_H_

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "shopbot/exclusion_protocol.h"
#include "shopbot/sim_engine.h"

namespace shopbot {

struct CrawlerAgent {
  std::string id;
  std::string agent_token;
  std::string origin_address;
  std::optional<std::string> proxy_address;
  double rate = 1.0;  // queries per tick
  // Compliant agents fetch /robots.txt first, skip disallowed paths and stay
  // under the advertised crawl limit.
  bool compliant = false;
  std::string declared_purpose = "commercial";
  std::vector<std::string> paths = {"/"};
  double catalog_fraction = 0.0;

  // The address the site sees: the proxy when present.
  const std::string& observed_address() const {
    return proxy_address ? *proxy_address : origin_address;
  }
};

struct Query {
  std::int64_t tick = 0;
  std::string agent_id;
  std::string address;  // as observed by the site
  std::string path = "/";
  bool robot = true;
};

enum class QueryOutcome { kAccepted, kRefused, kBlocked };

std::string_view outcome_name(QueryOutcome outcome);

struct TrafficEvent {
  std::int64_t tick = 0;
  std::string address;
  std::string agent;
  std::string path;
  QueryOutcome outcome = QueryOutcome::kAccepted;
  bool robot = true;
};

struct TrafficLedger {
  std::vector<TrafficEvent> events;
  std::map<std::string, std::deque<std::int64_t>> accepted_ticks;  // per address
  std::set<std::string> blocklist;
};

// Refuses queries from blocklisted addresses. Otherwise counts accepted
// queries from the address in the trailing window (tick - window, tick]; if
// this query would make it exceed `threshold`, the address is blocklisted
// permanently and the query refused (outcome kBlocked). Returns true iff the
// query was refused.
bool observe_query(TrafficLedger& ledger, const Query& query, std::int64_t threshold,
                   std::int64_t window);

struct LoadReport {
  std::int64_t robot_queries = 0;
  std::int64_t total_queries = 0;
  double robot_fraction = 0.0;
  bool harm_flag = false;
};

// Robot share of all queries with tick in (now - window, now].
LoadReport load_fraction(const TrafficLedger& ledger, std::int64_t window, std::int64_t now,
                         double capacity_threshold);

// Combined load of `robot_count` robots each contributing `per_robot_fraction`.
struct AggregateLoad {
  std::int64_t robot_count = 0;
  double per_robot_fraction = 0.0;
  double robot_fraction = 0.0;  // min(k * f, 1)
  bool harm_flag = false;
};

AggregateLoad aggregate_load(double per_robot_fraction, std::int64_t robot_count,
                             double capacity_threshold);

// Queries emitted in `tick` by a source running at `rate` per tick; integer
// over any prefix of ticks.
std::int64_t queries_in_tick(double rate, std::int64_t tick);

struct MetasiteConfig {
  int num_sellers = 10;
  // Ticks between metasite refreshes; empty means the metasite never refreshes.
  std::optional<std::int64_t> refresh_period = 1;
  bool vendor_robot = false;
  std::int64_t ticks = 100;
  std::uint64_t seed = 0;
  // Market driving vendor price updates; defaults to num_sellers myopic
  // sellers when empty.
  std::optional<SimulationConfig> market;
};

struct MetasiteReport {
  std::vector<std::int64_t> metasite_queries;  // per tick
  std::vector<std::int64_t> vendor_queries;    // per tick
  std::int64_t metasite_total = 0;
  std::int64_t vendor_total = 0;
  std::int64_t total = 0;
};

MetasiteReport metasite_scenario(const MetasiteConfig& config);

struct TrafficScenario {
  std::vector<CrawlerAgent> agents;
  double human_rate = 0.0;
  std::int64_t human_addresses = 1000;
  std::int64_t ticks = 100;
  std::int64_t threshold = 10;  // T
  std::int64_t window = 1;      // W
  double capacity_threshold = 0.25;
  std::optional<ExclusionPolicy> policy;
  // Ticks per reported load window; 0 means one window over the whole run.
  std::int64_t load_window = 0;
  std::vector<std::int64_t> aggregate_robot_counts = {1, 2, 5, 10, 20, 50, 65};
  std::optional<MetasiteConfig> metasite;

  void validate() const;
};

struct LoadWindow {
  std::int64_t start_tick = 0;
  std::int64_t end_tick = 0;  // inclusive
  LoadReport load;
};

struct TrafficResult {
  TrafficLedger ledger;
  std::vector<LoadWindow> windows;
  LoadReport overall;
  std::vector<AggregateLoad> aggregate;
  // Exclusion-protocol view of robot requests that reached the site.
  AssentLedger protocol;
  std::optional<MetasiteReport> metasite;
};

TrafficResult run_traffic(const TrafficScenario& scenario);

}  // namespace shopbot

#endif  // SHOPBOT_TRAFFIC_DEFENSE_H_
