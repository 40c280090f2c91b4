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

// Discrete-time market loop. Each tick exactly one seller (drawn from the
// seeded generator in proportion to its update weight) applies its pricing
// strategy; every seller's expected profit at the new prices is recorded.
// Runs are pure functions of (config, ticks, seed, initial prices).

#ifndef SHOPBOT_SIM_ENGINE_H_
#define SHOPBOT_SIM_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "shopbot/market_model.h"
#include "shopbot/price_grid.h"
#include "shopbot/strategy_kind.h"

namespace shopbot {

enum class Regime { kPriceWar, kCollusive, kCompetitive, kIndeterminate };

std::string_view regime_name(Regime regime);

struct RegimeReport {
  Regime classification = Regime::kIndeterminate;
  std::int64_t cycle_count = 0;
  double mean_trough = 0.0;
  double mean_peak = 0.0;
  double window_mean_price = 0.0;
  double window_cv = 0.0;
};

// Regime detector thresholds. Unset money thresholds default to multiples of
// the price tick: min_reset = 10 ticks, margin = 5 ticks.
struct DetectorSettings {
  int min_drop_run = 3;
  std::optional<double> min_reset;
  std::int64_t window = 500;
  std::optional<double> margin;
  double cv_max = 0.02;

  double resolved_min_reset(double tick) const { return min_reset.value_or(10.0 * tick); }
  double resolved_margin(double tick) const { return margin.value_or(5.0 * tick); }
};

struct SellerSpec {
  Ticks marginal_cost = 0;
  StrategyKind strategy = MyopicOptimal{};
  // Defaults to the fixed price for FixedStrategy, else price_max.
  std::optional<Ticks> initial_price;
  double update_weight = 1.0;
};

struct SimulationConfig {
  MarketConfig market;
  std::vector<SellerSpec> sellers;
  DetectorSettings detectors;
  // When set, the type-1 share drifts linearly from market.type1_fraction to
  // this value over the run.
  std::optional<double> type1_fraction_end;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct TickRecord {
  std::int64_t tick = 0;
  std::vector<Ticks> prices;
  std::vector<double> profits;
  int updated_seller = -1;
  // Price lookups issued by the updating seller (one per non-fixed update).
  int queries = 0;
};

struct MarketState {
  std::int64_t tick = 0;
  std::int64_t horizon = 1;
  std::vector<Seller> sellers;
  std::vector<double> cumulative_profit;
  std::mt19937_64 rng;
  std::vector<TickRecord> series;

  std::vector<Ticks> prices() const;
};

// Builds the tick-0 state. `initial_prices` overrides the per-seller defaults
// when non-empty.
MarketState initial_state(const SimulationConfig& config, std::uint64_t seed,
                          std::span<const Ticks> initial_prices,
                          std::int64_t horizon);

// Market parameters in effect at the state's current tick (buyer-mix drift).
MarketConfig effective_market(const SimulationConfig& config, const MarketState& state);

// Advances the state by one tick.
void step(MarketState& state, const SimulationConfig& config);

// Units a seller sells to B individually sampled buyers at these prices.
double sample_demand(std::size_t seller, std::span<const Ticks> prices,
                     const MarketConfig& config, std::mt19937_64& rng);

struct RunSummary {
  std::uint64_t seed = 0;
  std::int64_t ticks = 0;
  std::int64_t window_ticks = 0;
  std::vector<double> mean_profit;
  // Mean expected consumer surplus per tick over the final window.
  double consumer_surplus = 0.0;
  // Mean cross-seller dispersion over the final window; empty when a price
  // in the window is zero.
  std::optional<Dispersion> dispersion;
};

struct RunResult {
  std::vector<TickRecord> series;
  RegimeReport report;
  RunSummary summary;
};

RunResult run(const SimulationConfig& config, std::int64_t ticks, std::uint64_t seed,
              std::span<const Ticks> initial_prices = {});

struct RunRequest {
  SimulationConfig config;
  std::int64_t ticks = 1;
  std::uint64_t seed = 0;
  std::vector<Ticks> initial_prices;
};

// Independent runs on up to `threads` workers; results in request order.
std::vector<RunResult> run_many(std::span<const RunRequest> requests, unsigned threads);

// Lowest posted price at every tick of a series, in money.
std::vector<double> market_minimum_track(std::span<const TickRecord> series, double tick);

// Counts resets: upward jumps >= min_reset that immediately follow a
// non-increasing run of at least min_drop_run points. Two or more resets
// classify as a price war; cycle_count is zero otherwise.
RegimeReport detect_price_war(std::span<const double> series, int min_drop_run,
                              double min_reset);

// Collusive iff, over the last `window` points, the mean is at least
// cost + margin and the coefficient of variation is at most cv_max.
// Throws std::invalid_argument if the series is shorter than the window.
RegimeReport detect_collusion(std::span<const double> series, double marginal_cost,
                              std::int64_t window, double margin, double cv_max);

// Combined classification used by run(): price war, else collusion, else
// competitive when the window mean is within `margin` of cost.
RegimeReport classify_regime(std::span<const double> series, double marginal_cost,
                             const DetectorSettings& settings, double tick);

}  // namespace shopbot

#endif  // SHOPBOT_SIM_ENGINE_H_
