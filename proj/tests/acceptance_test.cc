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

// Acceptance gate. Prints one PASS or FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <tuple>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "shopbot/cli.h"
#include "shopbot/exclusion_protocol.h"
#include "shopbot/market_model.h"
#include "shopbot/pricing_strategies.h"
#include "shopbot/sim_engine.h"
#include "shopbot/traffic_defense.h"

namespace shopbot {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Wall-clock budgets, seconds.
constexpr double kBudgetDiscrimination = 0.001;
constexpr double kBudgetBertrand = 1.0;
constexpr double kBudgetPriceWar = 5.0;
constexpr double kBudgetCollusion = 5.0;
constexpr double kBudgetBestResponse = 1.0;
constexpr double kBudgetMonteCarlo = 10.0;

// Aggregate relative error allowed between analytic and sampled demand.
constexpr double kDemandTolerance = 0.01;
// Slack for comparing money values that went through the price grid.
constexpr double kMoneySlack = 1e-9;

struct CriterionResult {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SimulationConfig two_sellers(double w1, StrategyKind strategy) {
  SimulationConfig config;
  config.market.num_sellers = 2;
  config.market.buyers_per_tick = 100;
  config.market.type1_fraction = w1;
  config.market.valuation = ConstantValuation{1.0};
  config.market.price_tick = 0.01;
  config.market.price_max = 1.0;
  for (int s = 0; s < 2; ++s) {
    SellerSpec spec;
    spec.marginal_cost = 0;
    spec.strategy = strategy;
    spec.initial_price = 100;
    config.sellers.push_back(spec);
  }
  return config;
}

CriterionResult price_discrimination() {
  CriterionResult v;
  std::vector<double> valuations(10, 13.0);
  valuations.push_back(60.0);
  const auto start = Clock::now();
  const UniformPrice uniform = optimal_uniform_price(valuations, 9.0);
  const double discrimination = perfect_discrimination_profit(valuations, 9.0);
  const double elapsed = seconds_since(start);
  v.require(uniform.price == 60.0 && uniform.profit == 51.0,
            "uniform (" + fmt(uniform.price) + ", " + fmt(uniform.profit) + ")");
  v.require(discrimination == 91.0, "discrimination " + fmt(discrimination));
  v.require(elapsed < kBudgetDiscrimination, "took " + fmt(elapsed) + "s");
  v.detail = v.pass ? "uniform (60, 51), discrimination 91" : v.detail;
  return v;
}

CriterionResult bertrand_collapse() {
  CriterionResult v;
  const SimulationConfig config = two_sellers(0.0, MyopicOptimal{});
  constexpr std::int64_t kTicks = 2000;
  const auto start = Clock::now();
  const RunResult result = run(config, kTicks, 1);
  const double elapsed = seconds_since(start);
  const std::vector<double> minimum = market_minimum_track(result.series, 0.01);
  const double ceiling = 0.0 + 2 * 0.01 + kMoneySlack;
  std::int64_t reached = -1;
  for (std::size_t i = 0; i < minimum.size(); ++i) {
    if (minimum[i] <= ceiling) {
      reached = static_cast<std::int64_t>(i) + 1;
      break;
    }
  }
  v.require(reached > 0 && reached <= 500, "reached c+2e at tick " + std::to_string(reached));
  if (reached > 0) {
    const bool stays = std::all_of(minimum.begin() + (reached - 1), minimum.end(),
                                   [&](double p) { return p <= ceiling; });
    v.require(stays, "minimum rose above c+2e after reaching it");
  }
  v.require(elapsed < kBudgetBertrand, "took " + fmt(elapsed) + "s");
  if (v.pass) v.detail = "minimum <= c+2e from tick " + std::to_string(reached) + " through " + std::to_string(kTicks);
  return v;
}

CriterionResult price_war() {
  CriterionResult v;
  const double w1 = 0.75;
  const SimulationConfig config = two_sellers(w1, MyopicOptimal{});
  const auto start = Clock::now();
  const RunResult result = run(config, 5000, 7);
  const double elapsed = seconds_since(start);
  const std::vector<double> minimum = market_minimum_track(result.series, 0.01);
  const RegimeReport war = detect_price_war(minimum, config.detectors.min_drop_run,
                                            config.detectors.resolved_min_reset(0.01));
  v.require(war.classification == Regime::kPriceWar, "not classified as a price war");
  v.require(war.cycle_count >= 3, "cycles " + std::to_string(war.cycle_count));

  // A reset is any update that raises the updating seller's price.
  int resets = 0;
  double worst_reset = 0.0;
  for (std::size_t i = 1; i < result.series.size(); ++i) {
    const int s = result.series[i].updated_seller;
    if (s < 0) continue;
    const Ticks before = result.series[i - 1].prices[s];
    const Ticks after = result.series[i].prices[s];
    if (after > before) {
      ++resets;
      worst_reset = std::max(worst_reset, std::fabs(after * 0.01 - 1.0));
    }
  }
  v.require(resets >= 3, "resets " + std::to_string(resets));
  v.require(worst_reset <= 0.01 + kMoneySlack, "reset off 1.00 by " + fmt(worst_reset));

  // Troughs: local minima of the market minimum just before each reset.
  const double floor = w1 * 1.0 / 2 / (w1 / 2 + (1 - w1)) - 2 * 0.01;
  const double lowest = *std::min_element(minimum.begin(), minimum.end());
  v.require(lowest >= floor - kMoneySlack, "trough " + fmt(lowest) + " below " + fmt(floor));
  v.require(elapsed < kBudgetPriceWar, "took " + fmt(elapsed) + "s");
  if (v.pass) {
    v.detail = std::to_string(war.cycle_count) + " cycles, " + std::to_string(resets) +
               " resets at 1.00, lowest price " + fmt(lowest) + " >= " + fmt(floor);
  }
  return v;
}

CriterionResult collusion() {
  CriterionResult v;
  const SimulationConfig config = two_sellers(0.75, DerivativeFollower{1, -1});
  const auto start = Clock::now();
  const RunResult result = run(config, 5000, 7);
  const double elapsed = seconds_since(start);
  const std::vector<double> minimum = market_minimum_track(result.series, 0.01);
  const RegimeReport report =
      detect_collusion(minimum, 0.0, config.detectors.window, config.detectors.resolved_margin(0.01),
                       config.detectors.cv_max);
  v.require(report.classification == Regime::kCollusive, "not classified as collusive");
  v.require(report.window_mean_price >= 0.0 + 10 * 0.01 - kMoneySlack,
            "window mean " + fmt(report.window_mean_price));
  v.require(elapsed < kBudgetCollusion, "took " + fmt(elapsed) + "s");
  if (v.pass) v.detail = "window mean " + fmt(report.window_mean_price) + ", cv " + fmt(report.window_cv);
  return v;
}

CriterionResult best_response_oracle() {
  CriterionResult v;
  const double tick = 1.0 / 64;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> sellers(1, 5);
  std::uniform_int_distribution<int> k(0, 64);
  std::uniform_int_distribution<Ticks> grid(2, 199);
  int mismatches = 0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 100; ++trial) {
    testing::ExactInstance inst;
    inst.sellers = sellers(rng);
    inst.k = k(rng);
    const Ticks max_price = grid(rng);
    inst.constant = trial % 2 == 0;
    inst.value = 1 + static_cast<Ticks>(rng() % max_price);
    inst.hi = 1 + static_cast<Ticks>(rng() % max_price);
    inst.lo = static_cast<Ticks>(rng() % inst.hi);
    const MarketConfig c = testing::exact_config(inst, tick, max_price, 64);
    std::vector<Ticks> prices(inst.sellers);
    for (Ticks& p : prices) p = static_cast<Ticks>(rng() % (max_price + 1));
    const std::size_t s = rng() % prices.size();
    const Ticks cost = static_cast<Ticks>(rng() % (max_price + 1)) / 3;
    const std::vector<Ticks> best = testing::exact_best_responses(inst, s, prices, cost, max_price);
    if (myopic_best_response(s, prices, cost, c) != testing::preferred_best_response(inst, best)) {
      ++mismatches;
    }
  }
  const double elapsed = seconds_since(start);
  v.require(mismatches == 0, std::to_string(mismatches) + " of 100 instances differ");
  v.require(elapsed < kBudgetBestResponse, "took " + fmt(elapsed) + "s");
  if (v.pass) v.detail = "100 of 100 instances match the exhaustive argmax";
  return v;
}

CriterionResult demand_monte_carlo() {
  CriterionResult v;
  constexpr std::int64_t kBuyers = 100000;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 20; ++trial) {
    MarketConfig c;
    c.num_sellers = 1 + static_cast<int>(rng() % 3);
    c.buyers_per_tick = kBuyers;
    c.type1_fraction = std::floor(unit(rng) * 21) / 20;
    c.price_tick = 0.01;
    c.price_max = 2.0;
    if (trial % 2 == 0) {
      c.valuation = ConstantValuation{0.5 + std::floor(unit(rng) * 100) / 100};
    } else {
      c.valuation = UniformValuation{std::floor(unit(rng) * 50) / 100, 1.0 + std::floor(unit(rng) * 100) / 100};
    }
    std::vector<Ticks> p(c.num_sellers);
    const Ticks base = static_cast<Ticks>(rng() % 60);
    for (Ticks& x : p) x = base + 10 * static_cast<Ticks>(rng() % 4);
    const testing::SampledDemand sampled = testing::sample_buyers(c, p, kBuyers, 5000 + trial);
    double deviation = 0.0, total = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
      const double analytic = expected_demand(s, p, c).expected_units;
      deviation += std::fabs(sampled.total(s) - analytic);
      total += analytic;
    }
    worst = std::max(worst, total > 0 ? deviation / total : 1.0);
  }
  const double elapsed = seconds_since(start);
  v.require(worst <= kDemandTolerance, "worst relative error " + fmt(worst));
  v.require(elapsed < kBudgetMonteCarlo, "took " + fmt(elapsed) + "s");
  if (v.pass) v.detail = "worst relative error " + fmt(worst) + " over 20 configurations";
  return v;
}

AccessRequest request(const std::string& agent, const std::string& path, std::int64_t time,
                      double fraction = 0.0) {
  AccessRequest r;
  r.agent_token = agent;
  r.origin_address = agent + "-host";
  r.path = path;
  r.declared_purpose = "research";
  r.time = time;
  r.catalog_fraction_fetched = fraction;
  return r;
}

// Every half-open window (t - w, t] holds at most `limit` of `times`.
bool within_limit(std::vector<std::int64_t> times, std::int64_t limit, std::int64_t w) {
  std::sort(times.begin(), times.end());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto first = std::upper_bound(times.begin(), times.end(), times[i] - w);
    if (static_cast<std::int64_t>(&times[i] - &*first) + 1 > limit) return false;
  }
  return true;
}

CriterionResult protocol_conformance() {
  CriterionResult v;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(SHOPBOT_TEST_DATA) / "robots_corpus")) {
    ++files;
    const ExclusionPolicy first = parse_policy(slurp(entry.path()));
    const std::string canonical = serialize_policy(first);
    const ExclusionPolicy second = parse_policy(canonical);
    v.require(second.records == first.records && serialize_policy(second) == canonical,
              "no fixpoint for " + entry.path().filename().string());
  }
  v.require(files >= 50, "corpus has " + std::to_string(files) + " files");

  // Adversarial stream: bursts, window-edge hops and long gaps.
  std::mt19937_64 rng(211);
  const std::int64_t n = 5, w = 37;
  const ExclusionPolicy limited =
      parse_policy("User-agent: *\nCrawl-limit: " + std::to_string(n) + "/" + std::to_string(w) + "\n");
  AssentLedger ledger;
  const std::vector<std::string> agents = {"a", "b", "c"};
  for (const auto& a : agents) evaluate_access(limited, request(a, "/robots.txt", 0), ledger);
  std::map<std::string, std::vector<std::int64_t>> allows;
  std::int64_t t = 0;
  int events = 0;
  for (; events < 20000; ++events) {
    const auto r = rng() % 10;
    t += r < 5 ? 0 : r < 8 ? 1 : r < 9 ? w - 1 : static_cast<std::int64_t>(rng() % (2 * w));
    const std::string& a = agents[rng() % agents.size()];
    if (evaluate_access(limited, request(a, "/x", t), ledger).verdict == Verdict::kAllow) {
      allows[a].push_back(t);
    }
  }
  for (const auto& [agent, times] : allows) {
    v.require(within_limit(times, n, w), "window limit exceeded for " + agent);
  }

  // A crawler that honours every directive.
  const ExclusionPolicy policy = parse_policy(
      "User-agent: fairbot\nDisallow: /prices\nCrawl-limit: 7/50\nPurpose-allow: research\n"
      "Amount-limit: 0.5\n");
  AssentLedger crawl;
  std::int64_t now = 0;
  evaluate_access(policy, request("fairbot", "/robots.txt", now), crawl);
  std::vector<std::int64_t> sent;
  double fraction = 0.0;
  const std::vector<std::string> paths = {"/books", "/prices/a", "/search", "/"};
  while (crawl.events.size() < 10000) {
    now += static_cast<std::int64_t>(rng() % 3);
    const std::string& path = paths[rng() % paths.size()];
    std::erase_if(sent, [&](std::int64_t s) { return s <= now - 50; });
    if (path.rfind("/prices", 0) == 0 || sent.size() >= 7) continue;
    fraction = std::min(fraction + 1e-5, 0.5);
    evaluate_access(policy, request("fairbot", path, now, fraction), crawl);
    sent.push_back(now);
  }
  const LedgerReport report = ledger_report(crawl);
  v.require(report.totals.breach == 0 && report.totals.unassented == 0 && report.totals.throttled == 0,
            "compliant crawler logged " + std::to_string(report.totals.breach) + "/" +
                std::to_string(report.totals.unassented) + "/" + std::to_string(report.totals.throttled));
  if (v.pass) {
    v.detail = std::to_string(files) + " corpus files at fixpoint, " + std::to_string(events) +
               " adversarial events within limit, compliant crawler 0/0/0 over " +
               std::to_string(report.totals.compliant) + " requests";
  }
  return v;
}

CriterionResult load_arithmetic() {
  CriterionResult v;
  for (auto [robot, human, want] : {std::tuple{153, 9847, 0.0153}, std::tuple{2300, 97700, 0.023}}) {
    TrafficScenario s;
    s.ticks = 1;
    s.threshold = 1000000;
    s.human_rate = human;
    CrawlerAgent a;
    a.id = "robot";
    a.agent_token = "robot";
    a.origin_address = "10.0.0.9";
    a.rate = robot;
    s.agents = {a};
    const double got = run_traffic(s).overall.robot_fraction;
    v.require(got == want, "robot_fraction " + fmt(got) + " != " + fmt(want));
  }
  const AggregateLoad aggregate = aggregate_load(0.0153, 20, 0.25);
  v.require(std::fabs(aggregate.robot_fraction - 0.306) <= 1e-12,
            "aggregate " + fmt(aggregate.robot_fraction));
  v.require(aggregate.harm_flag, "harm flag not raised");
  if (v.pass) v.detail = "0.0153 and 0.023 exact, 20 robots give 0.306 with harm flag";
  return v;
}

CriterionResult throttled_metasite() {
  CriterionResult v;
  MetasiteConfig c;
  c.num_sellers = 10;
  for (std::int64_t r : {1, 2, 5, 7, 24, 25}) {
    for (std::int64_t ticks : {1, 23, 100, 240, 241}) {
      c.refresh_period = r;
      c.ticks = ticks;
      const std::int64_t want = (ticks + r - 1) / r * c.num_sellers;
      const std::int64_t got = metasite_scenario(c).total;
      v.require(got == want, "r=" + std::to_string(r) + " ticks=" + std::to_string(ticks) + " gives " +
                                 std::to_string(got));
    }
  }
  c.ticks = 240;
  c.refresh_period = 1;
  const std::int64_t hourly_base = metasite_scenario(c).total;
  c.refresh_period = 24;
  const std::int64_t hourly = metasite_scenario(c).total;
  v.require(hourly * 24 == hourly_base, std::to_string(hourly) + " vs " + std::to_string(hourly_base));
  if (v.pass) v.detail = "r=24 emits " + std::to_string(hourly) + " = " + std::to_string(hourly_base) + "/24";
  return v;
}

CriterionResult determinism() {
  CriterionResult v;
  const fs::path config = fs::path(SHOPBOT_TEST_DATA) / "scenarios" / "price_war.json";
  const fs::path root = fs::temp_directory_path() / "shopbot_acceptance_determinism";
  fs::remove_all(root);
  std::ostringstream sink;
  for (const char* name : {"a", "b"}) {
    cli::SimulateOptions options;
    options.config = config;
    options.out_dir = root / name;
    const int code = cli::cmd_simulate(options, sink, sink);
    v.require(code == cli::kExitOk, "exit code " + std::to_string(code));
  }
  for (const char* file : {"prices.csv", "summary.json"}) {
    const std::string a = slurp(root / "a" / file);
    v.require(!a.empty() && a == slurp(root / "b" / file), std::string(file) + " differs");
  }
  fs::remove_all(root);
  if (v.pass) v.detail = "prices.csv and summary.json byte-identical";
  return v;
}

}  // namespace
}  // namespace shopbot

int main() {
  using Criterion = std::pair<const char*, std::function<shopbot::CriterionResult()>>;
  const std::vector<Criterion> criteria = {
      {"price discrimination exactness", shopbot::price_discrimination},
      {"bertrand collapse", shopbot::bertrand_collapse},
      {"cyclical price war", shopbot::price_war},
      {"derivative-follower collusion", shopbot::collusion},
      {"best-response oracle", shopbot::best_response_oracle},
      {"demand monte-carlo", shopbot::demand_monte_carlo},
      {"protocol conformance", shopbot::protocol_conformance},
      {"load arithmetic", shopbot::load_arithmetic},
      {"throttled metasite", shopbot::throttled_metasite},
      {"determinism", shopbot::determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    shopbot::CriterionResult v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failures;
    std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
