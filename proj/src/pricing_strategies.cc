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

#include "shopbot/pricing_strategies.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include "shopbot/simd/kernels.h"

namespace shopbot {
namespace {

// Profits that agree to within rounding are ties.
constexpr double kTieTolerance = 1e-12;

// Highest index at or below `cap` whose value ties the maximum; above the
// cap only when nothing at or below it does.
std::size_t last_tied_max(std::span<const double> curve, std::size_t cap) {
  const std::size_t top = simd::argmax_last(curve);
  const double floor = curve[top] - kTieTolerance * std::fabs(curve[top]);
  for (std::size_t i = std::min(cap, curve.size() - 1) + 1; i-- > 0;) {
    if (curve[i] >= floor) return i;
  }
  for (std::size_t i = curve.size(); i-- > top;) {
    if (curve[i] >= floor) return i;
  }
  return top;
}

// Lowest index whose value ties the maximum.
std::size_t first_tied_max(std::span<const double> curve) {
  const double top = *std::max_element(curve.begin(), curve.end());
  const double floor = top - kTieTolerance * std::fabs(top);
  std::size_t i = 0;
  while (curve[i] < floor) ++i;
  return i;
}

}  // namespace

void validate_strategy(const StrategyKind& strategy) {
  if (const auto* f = std::get_if<FixedStrategy>(&strategy)) {
    if (f->price < 0) throw std::invalid_argument("strategy.price: must be non-negative");
  } else if (const auto* d = std::get_if<DerivativeFollower>(&strategy)) {
    if (d->step <= 0) throw std::invalid_argument("strategy.step: must be a positive number of ticks");
    if (d->direction != 1 && d->direction != -1) {
      throw std::invalid_argument("strategy.direction: must be +1 or -1");
    }
  }
}

void MixedStrategy::validate(Ticks max_price) const {
  if (support.empty()) throw std::invalid_argument("mixed strategy has empty support");
  double total = 0.0;
  std::vector<Ticks> prices;
  for (const auto& [price, weight] : support) {
    if (price < 0 || price > max_price) {
      throw std::invalid_argument("mixed strategy price outside [0, price_max]");
    }
    if (!(weight >= 0.0)) throw std::invalid_argument("mixed strategy weight is negative");
    total += weight;
    prices.push_back(price);
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("mixed strategy weights sum to " + std::to_string(total));
  }
  std::sort(prices.begin(), prices.end());
  if (std::adjacent_find(prices.begin(), prices.end()) != prices.end()) {
    throw std::invalid_argument("mixed strategy prices are not distinct");
  }
}

double MixedStrategy::probability_of(Ticks price) const {
  for (const auto& [p, w] : support) {
    if (p == price) return w;
  }
  return 0.0;
}

Ticks myopic_best_response(std::size_t seller, std::span<const Ticks> prices,
                           Ticks marginal_cost, const MarketConfig& config) {
  if (seller >= prices.size()) {
    throw std::out_of_range("seller index " + std::to_string(seller) + " out of range");
  }
  const DemandCoefficients coef = DemandCoefficients::from(config);
  const GridValuation gv = GridValuation::from(config);

  simd::ProfitCurveParams params;
  params.marginal_cost = marginal_cost;
  params.tick = config.price_tick;
  params.type1_base = coef.type1_base;
  params.type2_base = coef.type2_base;
  for (std::size_t j = 0; j < prices.size(); ++j) {
    if (j == seller) continue;
    if (prices[j] < params.rival_min) {
      params.rival_min = prices[j];
      params.rival_min_count = 1;
    } else if (prices[j] == params.rival_min) {
      ++params.rival_min_count;
    }
  }
  params.constant_valuation = gv.constant;
  params.value_ticks = gv.value_ticks;
  params.lo_ticks = gv.lo_ticks;
  params.hi_ticks = gv.hi_ticks;

  std::vector<double> curve(static_cast<std::size_t>(config.max_ticks()) + 1);
  simd::profit_curve(params, 0, curve);
  // Highest price at which any buyer still purchases.
  const Ticks cap = gv.constant ? gv.value_ticks : static_cast<Ticks>(std::ceil(gv.hi_ticks - 1e-9)) - 1;
  return static_cast<Ticks>(last_tied_max(curve, static_cast<std::size_t>(std::max<Ticks>(cap, 0))));
}

DerivativeStep derivative_follower_step(Ticks current_price, int direction,
                                        Ticks step, double profit_now,
                                        double profit_prev, Ticks lower,
                                        Ticks upper) {
  const int next = profit_now < profit_prev ? -direction : direction;
  const Ticks moved = current_price + static_cast<Ticks>(next) * step;
  return {std::clamp(moved, lower, upper), next};
}

std::vector<double> expected_profit_curve(std::size_t seller,
                                          std::span<const MixedStrategy> profile,
                                          Ticks marginal_cost,
                                          const MarketConfig& config) {
  if (seller >= profile.size()) {
    throw std::out_of_range("seller index " + std::to_string(seller) + " out of range");
  }
  const std::size_t grid = static_cast<std::size_t>(config.max_ticks()) + 1;
  const DemandCoefficients coef = DemandCoefficients::from(config);
  const GridValuation gv = GridValuation::from(config);

  // above[j][p] = Pr(rival j prices strictly above p); at[j][p] = Pr(== p).
  std::vector<std::vector<double>> above, at;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (j == seller) continue;
    std::vector<double> mass(grid, 0.0);
    for (const auto& [p, w] : profile[j].support) {
      if (p >= 0 && static_cast<std::size_t>(p) < grid) mass[p] += w;
    }
    std::vector<double> tail(grid, 0.0);
    double running = 0.0;
    for (std::size_t p = grid; p-- > 0;) {
      tail[p] = running;
      running += mass[p];
    }
    above.push_back(std::move(tail));
    at.push_back(std::move(mass));
  }

  std::vector<double> curve(grid);
  std::vector<double> poly;
  for (std::size_t p = 0; p < grid; ++p) {
    // Coefficients of prod_j (above_j + at_j z): poly[k] = Pr(no rival below
    // p and exactly k rivals tied at p).
    poly.assign(1, 1.0);
    for (std::size_t j = 0; j < above.size(); ++j) {
      poly.push_back(0.0);
      for (std::size_t k = poly.size() - 1; k > 0; --k) {
        poly[k] = poly[k] * above[j][p] + poly[k - 1] * at[j][p];
      }
      poly[0] *= above[j][p];
    }
    double share = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) share += poly[k] / static_cast<double>(k + 1);

    const double q = gv.survival(static_cast<Ticks>(p));
    const double units = coef.type1_base * q + coef.type2_base * q * share;
    curve[p] = margin_times_units(static_cast<Ticks>(p), marginal_cost, config.price_tick, units);
  }
  return curve;
}

NashCheck verify_epsilon_nash(std::span<const MixedStrategy> profile,
                              std::span<const Ticks> marginal_costs,
                              const MarketConfig& config, double eps) {
  if (profile.size() != static_cast<std::size_t>(config.num_sellers) ||
      marginal_costs.size() != profile.size()) {
    throw std::invalid_argument("profile and costs need one entry per seller");
  }
  const Ticks max_price = config.max_ticks();
  NashCheck result;
  for (std::size_t s = 0; s < profile.size(); ++s) {
    profile[s].validate(max_price);
    const std::vector<double> curve =
        expected_profit_curve(s, profile, marginal_costs[s], config);
    double current = 0.0;
    for (const auto& [p, w] : profile[s].support) current += w * curve[p];
    for (std::size_t p = 0; p < curve.size(); ++p) {
      const double gain = curve[p] - current;
      if (gain > result.worst_gain) {
        result.worst_gain = gain;
        result.witness = Deviation{s, static_cast<Ticks>(p), gain};
      }
    }
  }
  result.is_nash = result.worst_gain <= eps;
  return result;
}

std::vector<MixedStrategy> fictitious_play(const MarketConfig& config,
                                           std::span<const Ticks> marginal_costs,
                                           int iterations, std::uint64_t seed) {
  config.validate();
  if (iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  const std::size_t sellers = static_cast<std::size_t>(config.num_sellers);
  if (marginal_costs.size() != sellers) {
    throw std::invalid_argument("need one marginal cost per seller");
  }
  const Ticks max_price = config.max_ticks();
  const std::size_t grid = static_cast<std::size_t>(max_price) + 1;

  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> belief(sellers, std::vector<double>(grid, 0.0));
  std::vector<std::vector<double>> plays(sellers, std::vector<double>(grid, 0.0));
  for (std::size_t s = 0; s < sellers; ++s) {
    belief[s][rng() % grid] = 1.0;
  }

  auto to_mixed = [](const std::vector<double>& counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    MixedStrategy m;
    for (std::size_t p = 0; p < counts.size(); ++p) {
      if (counts[p] > 0.0) m.support.emplace_back(static_cast<Ticks>(p), counts[p] / total);
    }
    return m;
  };

  std::vector<MixedStrategy> profile(sellers);
  for (std::size_t s = 0; s < sellers; ++s) profile[s] = to_mixed(belief[s]);
  // Sellers respond in turn, each against the latest counts of the others.
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t s = 0; s < sellers; ++s) {
      const std::vector<double> curve =
          expected_profit_curve(s, profile, marginal_costs[s], config);
      const std::size_t chosen = first_tied_max(curve);
      belief[s][chosen] += 1.0;
      plays[s][chosen] += 1.0;
      profile[s] = to_mixed(belief[s]);
    }
  }

  std::vector<MixedStrategy> result;
  result.reserve(sellers);
  for (std::size_t s = 0; s < sellers; ++s) result.push_back(to_mixed(plays[s]));
  return result;
}

}  // namespace shopbot
