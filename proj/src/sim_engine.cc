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

#include "shopbot/sim_engine.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

#include "shopbot/pricing_strategies.h"
#include "shopbot/simd/kernels.h"

namespace shopbot {
namespace {

// Portable [0, 1) draw; std::uniform_real_distribution is not specified
// bit-for-bit across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

MarketConfig market_at(const SimulationConfig& config, std::int64_t tick,
                       std::int64_t horizon) {
  MarketConfig m = config.market;
  if (config.type1_fraction_end) {
    const double span = static_cast<double>(std::max<std::int64_t>(horizon - 1, 1));
    const double progress = std::min(static_cast<double>(tick) / span, 1.0);
    m.type1_fraction += (*config.type1_fraction_end - m.type1_fraction) * progress;
  }
  return m;
}

std::size_t pick_seller(const std::vector<Seller>& sellers, std::mt19937_64& rng) {
  double total = 0.0;
  for (const Seller& s : sellers) total += s.update_weight;
  const double target = uniform01(rng) * total;
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < sellers.size(); ++i) {
    if (sellers[i].update_weight <= 0.0) continue;
    last_positive = i;
    running += sellers[i].update_weight;
    if (target < running) return i;
  }
  return last_positive;
}

}  // namespace

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::kPriceWar:
      return "PriceWar";
    case Regime::kCollusive:
      return "Collusive";
    case Regime::kCompetitive:
      return "Competitive";
    case Regime::kIndeterminate:
      return "Indeterminate";
  }
  return "Indeterminate";
}

void SimulationConfig::validate() const {
  market.validate();
  const Ticks max_price = market.max_ticks();
  if (sellers.size() != static_cast<std::size_t>(market.num_sellers)) {
    invalid("sellers", "expected " + std::to_string(market.num_sellers) + " entries, got " +
                           std::to_string(sellers.size()));
  }
  double total_weight = 0.0;
  for (std::size_t i = 0; i < sellers.size(); ++i) {
    const SellerSpec& s = sellers[i];
    const std::string field = "sellers[" + std::to_string(i) + "]";
    if (s.marginal_cost < 0 || s.marginal_cost > max_price) {
      invalid(field + ".cost", "must lie in [0, price_max]");
    }
    try {
      validate_strategy(s.strategy);
    } catch (const std::invalid_argument& e) {
      invalid(field, e.what());
    }
    if (const auto* f = std::get_if<FixedStrategy>(&s.strategy); f && f->price > max_price) {
      invalid(field + ".strategy.price", "exceeds price_max");
    }
    if (s.initial_price && (*s.initial_price < 0 || *s.initial_price > max_price)) {
      invalid(field + ".initial_price", "must lie in [0, price_max]");
    }
    if (!(s.update_weight >= 0.0) || !std::isfinite(s.update_weight)) {
      invalid(field + ".update_weight", "must be a non-negative number");
    }
    total_weight += s.update_weight;
  }
  if (!(total_weight > 0.0)) invalid("sellers", "at least one update_weight must be positive");
  if (detectors.min_drop_run < 2) invalid("detectors.min_drop_run", "must be at least 2");
  if (detectors.min_reset && !(*detectors.min_reset > 0.0)) {
    invalid("detectors.min_reset", "must be positive");
  }
  if (detectors.window < 1) invalid("detectors.window", "must be at least 1");
  if (detectors.margin && !(*detectors.margin >= 0.0)) {
    invalid("detectors.margin", "must be non-negative");
  }
  if (!(detectors.cv_max >= 0.0)) invalid("detectors.cv_max", "must be non-negative");
  if (type1_fraction_end && !(*type1_fraction_end >= 0.0 && *type1_fraction_end <= 1.0)) {
    invalid("type1_fraction_end", "must be in [0, 1]");
  }
}

std::vector<Ticks> MarketState::prices() const {
  std::vector<Ticks> out;
  out.reserve(sellers.size());
  for (const Seller& s : sellers) out.push_back(s.current_price);
  return out;
}

MarketState initial_state(const SimulationConfig& config, std::uint64_t seed,
                          std::span<const Ticks> initial_prices,
                          std::int64_t horizon) {
  const Ticks max_price = config.market.max_ticks();
  if (!initial_prices.empty() && initial_prices.size() != config.sellers.size()) {
    throw std::invalid_argument("initial_prices: expected one price per seller");
  }
  MarketState state;
  state.horizon = std::max<std::int64_t>(horizon, 1);
  state.rng.seed(seed);
  for (std::size_t i = 0; i < config.sellers.size(); ++i) {
    const SellerSpec& spec = config.sellers[i];
    Seller s;
    s.id = static_cast<int>(i);
    s.marginal_cost = spec.marginal_cost;
    s.strategy = spec.strategy;
    s.update_weight = spec.update_weight;
    if (!initial_prices.empty()) {
      s.current_price = initial_prices[i];
    } else if (spec.initial_price) {
      s.current_price = *spec.initial_price;
    } else if (const auto* f = std::get_if<FixedStrategy>(&spec.strategy)) {
      s.current_price = f->price;
    } else {
      s.current_price = max_price;
    }
    if (s.current_price < 0 || s.current_price > max_price) {
      throw std::invalid_argument("initial_prices: price outside [0, price_max]");
    }
    state.sellers.push_back(std::move(s));
  }
  const std::vector<Ticks> prices = state.prices();
  const MarketConfig market = market_at(config, 0, state.horizon);
  for (std::size_t i = 0; i < state.sellers.size(); ++i) {
    state.sellers[i].last_profit = profit(i, prices, state.sellers[i].marginal_cost, market);
  }
  state.cumulative_profit.assign(state.sellers.size(), 0.0);
  return state;
}

MarketConfig effective_market(const SimulationConfig& config, const MarketState& state) {
  return market_at(config, state.tick, state.horizon);
}

double sample_demand(std::size_t seller, std::span<const Ticks> prices,
                     const MarketConfig& config, std::mt19937_64& rng) {
  if (seller >= prices.size()) throw std::out_of_range("seller index out of range");
  const Ticks lowest = *std::min_element(prices.begin(), prices.end());
  std::vector<std::size_t> tied;
  for (std::size_t j = 0; j < prices.size(); ++j) {
    if (prices[j] == lowest) tied.push_back(j);
  }
  const GridValuation gv = GridValuation::from(config);
  double units = 0.0;
  for (std::int64_t b = 0; b < config.buyers_per_tick; ++b) {
    const bool captive = uniform01(rng) < config.type1_fraction;
    // Draw the valuation as a survival threshold: the buyer purchases at
    // price t iff u < Q(t), which reproduces Pr(v >= t) for both models.
    const double u = uniform01(rng);
    std::size_t target;
    if (captive) {
      target = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(prices.size()));
    } else {
      target = tied[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(tied.size()))];
    }
    if (target == seller && u < gv.survival(prices[target])) units += 1.0;
  }
  return units;
}

void step(MarketState& state, const SimulationConfig& config) {
  const MarketConfig market = effective_market(config, state);
  const Ticks max_price = market.max_ticks();
  const std::size_t idx = pick_seller(state.sellers, state.rng);
  Seller& seller = state.sellers[idx];
  const std::vector<Ticks> before = state.prices();

  int queries = 1;
  if (const auto* fixed = std::get_if<FixedStrategy>(&seller.strategy)) {
    seller.current_price = fixed->price;
    queries = 0;
  } else if (auto* df = std::get_if<DerivativeFollower>(&seller.strategy)) {
    double profit_now;
    if (df->sampled_profit) {
      const double units = sample_demand(idx, before, market, state.rng);
      profit_now = margin_times_units(seller.current_price, seller.marginal_cost,
                                      market.price_tick, units);
    } else {
      profit_now = profit(idx, before, seller.marginal_cost, market);
    }
    const DerivativeStep next =
        derivative_follower_step(seller.current_price, df->direction, df->step, profit_now,
                                 seller.last_profit, seller.marginal_cost, max_price);
    seller.current_price = next.price;
    df->direction = next.direction;
    seller.last_profit = profit_now;
  } else {
    seller.current_price = myopic_best_response(idx, before, seller.marginal_cost, market);
  }

  ++state.tick;
  TickRecord record;
  record.tick = state.tick;
  record.prices = state.prices();
  record.updated_seller = static_cast<int>(idx);
  record.queries = queries;
  record.profits.reserve(state.sellers.size());
  for (std::size_t i = 0; i < state.sellers.size(); ++i) {
    const double pi = profit(i, record.prices, state.sellers[i].marginal_cost, market);
    record.profits.push_back(pi);
    state.cumulative_profit[i] += pi;
  }
  state.series.push_back(std::move(record));
}

std::vector<double> market_minimum_track(std::span<const TickRecord> series, double tick) {
  std::vector<double> track;
  track.reserve(series.size());
  for (const TickRecord& r : series) {
    const Ticks lowest = *std::min_element(r.prices.begin(), r.prices.end());
    track.push_back(static_cast<double>(lowest) * tick);
  }
  return track;
}

RegimeReport detect_price_war(std::span<const double> series, int min_drop_run,
                              double min_reset) {
  if (series.empty()) throw std::invalid_argument("price series is empty");
  if (min_drop_run < 2) throw std::invalid_argument("min_drop_run must be at least 2");
  if (!(min_reset > 0.0)) throw std::invalid_argument("min_reset must be positive");
  // Absorbs representation error in differences of tick multiples.
  const double jump = min_reset * (1.0 - 1e-9);

  std::int64_t resets = 0;
  double trough_sum = 0.0, peak_sum = 0.0;
  int run = 1;
  for (std::size_t t = 1; t < series.size(); ++t) {
    const double diff = series[t] - series[t - 1];
    if (diff >= jump) {
      if (run >= min_drop_run) {
        ++resets;
        trough_sum += series[t - 1];
        peak_sum += series[t];
      }
      run = 1;
    } else if (diff <= 0.0) {
      ++run;
    } else {
      run = 1;
    }
  }

  RegimeReport report;
  if (resets > 0) {
    report.mean_trough = trough_sum / static_cast<double>(resets);
    report.mean_peak = peak_sum / static_cast<double>(resets);
  }
  if (resets >= 2) {
    report.classification = Regime::kPriceWar;
    report.cycle_count = resets;
  }
  return report;
}

RegimeReport detect_collusion(std::span<const double> series, double marginal_cost,
                              std::int64_t window, double margin, double cv_max) {
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  if (series.size() < static_cast<std::size_t>(window)) {
    throw std::invalid_argument("series shorter than the collusion window");
  }
  const auto tail = series.subspan(series.size() - static_cast<std::size_t>(window));
  const simd::Moments m = simd::moments(tail);
  RegimeReport report;
  report.window_mean_price = m.mean;
  if (m.sum_sq_dev == 0.0) {
    report.window_cv = 0.0;
  } else {
    report.window_cv = std::sqrt(m.sum_sq_dev / static_cast<double>(m.count)) / std::fabs(m.mean);
  }
  const double floor = (marginal_cost + margin) * (1.0 - 1e-12);
  if (m.mean >= floor && report.window_cv <= cv_max) {
    report.classification = Regime::kCollusive;
  }
  return report;
}

RegimeReport classify_regime(std::span<const double> series, double marginal_cost,
                             const DetectorSettings& settings, double tick) {
  const double margin = settings.resolved_margin(tick);
  const RegimeReport war =
      detect_price_war(series, settings.min_drop_run, settings.resolved_min_reset(tick));
  const std::int64_t window =
      std::min<std::int64_t>(settings.window, static_cast<std::int64_t>(series.size()));
  RegimeReport report =
      detect_collusion(series, marginal_cost, window, margin, settings.cv_max);
  report.cycle_count = war.cycle_count;
  report.mean_trough = war.mean_trough;
  report.mean_peak = war.mean_peak;
  if (war.classification == Regime::kPriceWar) {
    report.classification = Regime::kPriceWar;
  } else if (report.classification != Regime::kCollusive) {
    report.classification = report.window_mean_price < marginal_cost + margin
                                ? Regime::kCompetitive
                                : Regime::kIndeterminate;
  }
  return report;
}

RunResult run(const SimulationConfig& config, std::int64_t ticks, std::uint64_t seed,
              std::span<const Ticks> initial_prices) {
  config.validate();
  if (ticks < 1) throw std::invalid_argument("ticks: must be at least 1");
  MarketState state = initial_state(config, seed, initial_prices, ticks);
  state.series.reserve(static_cast<std::size_t>(ticks));
  for (std::int64_t t = 0; t < ticks; ++t) step(state, config);

  const double tick = config.market.price_tick;
  Ticks lowest_cost = config.sellers.front().marginal_cost;
  for (const SellerSpec& s : config.sellers) lowest_cost = std::min(lowest_cost, s.marginal_cost);

  RunResult result;
  const std::vector<double> track = market_minimum_track(state.series, tick);
  result.report = classify_regime(track, static_cast<double>(lowest_cost) * tick,
                                  config.detectors, tick);

  RunSummary& summary = result.summary;
  summary.seed = seed;
  summary.ticks = ticks;
  summary.window_ticks = std::min(config.detectors.window, ticks);
  for (double total : state.cumulative_profit) {
    summary.mean_profit.push_back(total / static_cast<double>(ticks));
  }
  const std::size_t first = state.series.size() - static_cast<std::size_t>(summary.window_ticks);
  double surplus = 0.0, range_ratio = 0.0, cv = 0.0;
  bool dispersion_defined = true;
  std::vector<double> money;
  for (std::size_t i = first; i < state.series.size(); ++i) {
    const TickRecord& r = state.series[i];
    surplus += expected_consumer_surplus(r.prices, market_at(config, r.tick - 1, ticks));
    money.clear();
    for (Ticks p : r.prices) {
      if (p <= 0) dispersion_defined = false;
      money.push_back(static_cast<double>(p) * tick);
    }
    if (dispersion_defined) {
      const Dispersion d = price_dispersion(money);
      range_ratio += d.range_ratio;
      cv += d.coeff_variation;
    }
  }
  const double window = static_cast<double>(summary.window_ticks);
  summary.consumer_surplus = surplus / window;
  if (dispersion_defined) summary.dispersion = Dispersion{range_ratio / window, cv / window};
  result.series = std::move(state.series);
  return result;
}

std::vector<RunResult> run_many(std::span<const RunRequest> requests, unsigned threads) {
  std::vector<RunResult> results(requests.size());
  std::vector<std::exception_ptr> errors(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < requests.size(); i = next++) {
      try {
        const RunRequest& r = requests[i];
        results[i] = run(r.config, r.ticks, r.seed, r.initial_prices);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(requests.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace shopbot
