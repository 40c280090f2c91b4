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

#include "shopbot/traffic_defense.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shopbot {
namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

SimulationConfig default_vendor_market(int sellers) {
  SimulationConfig config;
  config.market.num_sellers = sellers;
  config.market.type1_fraction = 0.5;
  config.sellers.assign(static_cast<std::size_t>(sellers), SellerSpec{});
  return config;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Per-agent crawler state for compliant agents.
struct CrawlerState {
  bool fetched_policy = false;
  std::size_t next_path = 0;
  std::deque<std::int64_t> sent;
};

// Next request a compliant crawler may send this tick, or nothing if the
// policy leaves it idle.
std::optional<std::string> compliant_next_path(const CrawlerAgent& agent,
                                               const ExclusionPolicy* policy,
                                               CrawlerState& state, std::int64_t tick) {
  if (policy != nullptr && !state.fetched_policy) {
    state.fetched_policy = true;
    return std::string("/robots.txt");
  }
  const PolicyRecord* record = policy ? match_record(*policy, agent.agent_token) : nullptr;
  if (record != nullptr) {
    if (record->purpose_allow &&
        std::find(record->purpose_allow->begin(), record->purpose_allow->end(),
                  lower(agent.declared_purpose)) == record->purpose_allow->end()) {
      return std::nullopt;
    }
    if (record->amount_limit && agent.catalog_fraction > *record->amount_limit) {
      return std::nullopt;
    }
    if (record->crawl_limit) {
      const CrawlLimit& limit = *record->crawl_limit;
      while (!state.sent.empty() && state.sent.front() <= tick - limit.window_seconds) {
        state.sent.pop_front();
      }
      if (static_cast<std::int64_t>(state.sent.size()) >= limit.max_queries) return std::nullopt;
    }
  }
  for (std::size_t tries = 0; tries < agent.paths.size(); ++tries) {
    const std::string& path = agent.paths[state.next_path];
    state.next_path = (state.next_path + 1) % agent.paths.size();
    const bool blocked = record != nullptr &&
                         std::any_of(record->disallow.begin(), record->disallow.end(),
                                     [&](const std::string& p) { return path.starts_with(p); });
    if (!blocked) {
      state.sent.push_back(tick);
      return path;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view outcome_name(QueryOutcome outcome) {
  switch (outcome) {
    case QueryOutcome::kAccepted:
      return "accepted";
    case QueryOutcome::kRefused:
      return "refused";
    case QueryOutcome::kBlocked:
      return "blocked";
  }
  return "accepted";
}

bool observe_query(TrafficLedger& ledger, const Query& query, std::int64_t threshold,
                   std::int64_t window) {
  if (threshold < 1 || window < 1) {
    throw std::invalid_argument("threshold and window must be at least 1");
  }
  if (!ledger.events.empty() && query.tick < ledger.events.back().tick) {
    throw std::invalid_argument("queries must arrive in tick order");
  }
  TrafficEvent event{query.tick, query.address, query.agent_id, query.path,
                     QueryOutcome::kAccepted, query.robot};
  bool refused = false;
  if (ledger.blocklist.contains(query.address)) {
    event.outcome = QueryOutcome::kRefused;
    refused = true;
  } else {
    auto& recent = ledger.accepted_ticks[query.address];
    while (!recent.empty() && recent.front() <= query.tick - window) recent.pop_front();
    if (static_cast<std::int64_t>(recent.size()) + 1 > threshold) {
      ledger.blocklist.insert(query.address);
      ledger.accepted_ticks.erase(query.address);
      event.outcome = QueryOutcome::kBlocked;
      refused = true;
    } else {
      recent.push_back(query.tick);
    }
  }
  ledger.events.push_back(std::move(event));
  return refused;
}

LoadReport load_fraction(const TrafficLedger& ledger, std::int64_t window, std::int64_t now,
                         double capacity_threshold) {
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  LoadReport report;
  for (const TrafficEvent& e : ledger.events) {
    if (e.tick <= now - window || e.tick > now) continue;
    ++report.total_queries;
    if (e.robot) ++report.robot_queries;
  }
  if (report.total_queries > 0) {
    report.robot_fraction =
        static_cast<double>(report.robot_queries) / static_cast<double>(report.total_queries);
    report.harm_flag = report.robot_fraction > capacity_threshold;
  }
  return report;
}

AggregateLoad aggregate_load(double per_robot_fraction, std::int64_t robot_count,
                             double capacity_threshold) {
  if (!(per_robot_fraction >= 0.0 && per_robot_fraction <= 1.0)) {
    throw std::invalid_argument("per-robot fraction must lie in [0, 1]");
  }
  if (robot_count < 0) throw std::invalid_argument("robot count must be non-negative");
  AggregateLoad load;
  load.robot_count = robot_count;
  load.per_robot_fraction = per_robot_fraction;
  load.robot_fraction = std::min(static_cast<double>(robot_count) * per_robot_fraction, 1.0);
  load.harm_flag = load.robot_fraction > capacity_threshold;
  return load;
}

std::int64_t queries_in_tick(double rate, std::int64_t tick) {
  const auto upto = [rate](std::int64_t t) {
    return static_cast<std::int64_t>(std::floor(rate * static_cast<double>(t) + 1e-9));
  };
  return upto(tick + 1) - upto(tick);
}

MetasiteReport metasite_scenario(const MetasiteConfig& config) {
  if (config.num_sellers < 1) invalid("metasite.num_sellers", "must be at least 1");
  if (config.refresh_period && *config.refresh_period < 1) {
    invalid("metasite.refresh_period", "must be at least 1");
  }
  if (config.ticks < 0) invalid("metasite.ticks", "must be non-negative");

  MetasiteReport report;
  const auto ticks = static_cast<std::size_t>(config.ticks);
  report.metasite_queries.assign(ticks, 0);
  report.vendor_queries.assign(ticks, 0);
  if (config.refresh_period) {
    for (std::size_t t = 0; t < ticks; ++t) {
      if (static_cast<std::int64_t>(t) % *config.refresh_period == 0) {
        report.metasite_queries[t] = config.num_sellers;
      }
    }
  }
  if (config.vendor_robot && config.ticks > 0) {
    const SimulationConfig market =
        config.market ? *config.market : default_vendor_market(config.num_sellers);
    const RunResult result = run(market, config.ticks, config.seed);
    for (std::size_t t = 0; t < ticks; ++t) report.vendor_queries[t] = result.series[t].queries;
  }
  for (std::size_t t = 0; t < ticks; ++t) {
    report.metasite_total += report.metasite_queries[t];
    report.vendor_total += report.vendor_queries[t];
  }
  report.total = report.metasite_total + report.vendor_total;
  return report;
}

void TrafficScenario::validate() const {
  if (ticks < 0) invalid("traffic.ticks", "must be non-negative");
  if (threshold < 1) invalid("traffic.threshold", "must be at least 1");
  if (window < 1) invalid("traffic.window", "must be at least 1");
  if (!(capacity_threshold >= 0.0)) invalid("traffic.capacity_threshold", "must be non-negative");
  if (!(human_rate >= 0.0) || !std::isfinite(human_rate)) {
    invalid("traffic.human_rate", "must be non-negative");
  }
  if (human_addresses < 1) invalid("traffic.human_addresses", "must be at least 1");
  if (load_window < 0) invalid("traffic.load_window", "must be non-negative");
  for (std::int64_t k : aggregate_robot_counts) {
    if (k < 0) invalid("traffic.aggregate_robot_counts", "entries must be non-negative");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const CrawlerAgent& a = agents[i];
    const std::string field = "traffic.agents[" + std::to_string(i) + "]";
    if (a.id.empty()) invalid(field + ".id", "must be non-empty");
    if (!ids.insert(a.id).second) invalid(field + ".id", "duplicate id '" + a.id + "'");
    if (a.origin_address.empty()) invalid(field + ".origin", "must be non-empty");
    if (!(a.rate >= 0.0) || !std::isfinite(a.rate)) invalid(field + ".rate", "must be non-negative");
    if (a.paths.empty()) invalid(field + ".paths", "must list at least one path");
    for (const std::string& p : a.paths) {
      if (!p.starts_with('/')) invalid(field + ".paths", "paths must begin with '/'");
    }
    if (!(a.catalog_fraction >= 0.0 && a.catalog_fraction <= 1.0)) {
      invalid(field + ".catalog_fraction", "must lie in [0, 1]");
    }
  }
  if (metasite) {
    if (metasite->num_sellers < 1) invalid("traffic.metasite.num_sellers", "must be at least 1");
    if (metasite->refresh_period && *metasite->refresh_period < 1) {
      invalid("traffic.metasite.refresh_period", "must be at least 1");
    }
    if (metasite->ticks < 0) invalid("traffic.metasite.ticks", "must be non-negative");
    if (metasite->market) metasite->market->validate();
  }
}

TrafficResult run_traffic(const TrafficScenario& scenario) {
  scenario.validate();
  TrafficResult result;
  const ExclusionPolicy* policy = scenario.policy ? &*scenario.policy : nullptr;
  std::vector<CrawlerState> crawlers(scenario.agents.size());
  std::int64_t human_counter = 0;

  auto submit = [&](const Query& q, const CrawlerAgent* agent) {
    const bool refused = observe_query(result.ledger, q, scenario.threshold, scenario.window);
    if (refused || agent == nullptr || policy == nullptr) return;
    AccessRequest request;
    request.agent_token = agent->agent_token;
    request.origin_address = agent->origin_address;
    request.proxy_address = agent->proxy_address;
    request.path = q.path;
    request.declared_purpose = agent->declared_purpose;
    request.time = q.tick;
    request.catalog_fraction_fetched = agent->catalog_fraction;
    evaluate_access(*policy, request, result.protocol);
  };

  for (std::int64_t tick = 0; tick < scenario.ticks; ++tick) {
    const std::int64_t humans = queries_in_tick(scenario.human_rate, tick);
    for (std::int64_t h = 0; h < humans; ++h) {
      const std::string address =
          "human-" + std::to_string(human_counter++ % scenario.human_addresses);
      submit({tick, "human", address, "/", false}, nullptr);
    }
    for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
      const CrawlerAgent& agent = scenario.agents[i];
      const std::int64_t n = queries_in_tick(agent.rate, tick);
      for (std::int64_t k = 0; k < n; ++k) {
        std::string path;
        if (agent.compliant) {
          auto next = compliant_next_path(agent, policy, crawlers[i], tick);
          if (!next) break;
          path = std::move(*next);
        } else {
          path = agent.paths[crawlers[i].next_path];
          crawlers[i].next_path = (crawlers[i].next_path + 1) % agent.paths.size();
        }
        submit({tick, agent.id, agent.observed_address(), path, true}, &agent);
      }
    }
  }

  const std::int64_t span = scenario.load_window > 0 ? scenario.load_window
                                                     : std::max<std::int64_t>(scenario.ticks, 1);
  for (std::int64_t start = 0; start < scenario.ticks; start += span) {
    const std::int64_t end = std::min(start + span, scenario.ticks) - 1;
    result.windows.push_back(
        {start, end,
         load_fraction(result.ledger, end - start + 1, end, scenario.capacity_threshold)});
  }
  const std::int64_t last = std::max<std::int64_t>(scenario.ticks, 1) - 1;
  result.overall = load_fraction(result.ledger, std::max<std::int64_t>(scenario.ticks, 1), last,
                                 scenario.capacity_threshold);

  const auto robots = std::count_if(scenario.agents.begin(), scenario.agents.end(),
                                    [](const CrawlerAgent& a) { return a.rate > 0.0; });
  const double per_robot =
      robots > 0 ? result.overall.robot_fraction / static_cast<double>(robots) : 0.0;
  for (std::int64_t k : scenario.aggregate_robot_counts) {
    result.aggregate.push_back(aggregate_load(per_robot, k, scenario.capacity_threshold));
  }
  if (scenario.metasite) result.metasite = metasite_scenario(*scenario.metasite);
  return result;
}

}  // namespace shopbot
