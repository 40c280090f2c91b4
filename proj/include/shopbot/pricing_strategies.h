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

// Seller pricing behaviours (fixed, derivative-following, myopically optimal)
// and equilibrium checks over mixed price profiles.

#ifndef SHOPBOT_PRICING_STRATEGIES_H_
#define SHOPBOT_PRICING_STRATEGIES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "shopbot/market_model.h"
#include "shopbot/price_grid.h"
#include "shopbot/strategy_kind.h"

namespace shopbot {

struct MixedStrategy {
  // (price, probability) pairs with distinct prices.
  std::vector<std::pair<Ticks, double>> support;

  static MixedStrategy pure(Ticks price) { return {{{price, 1.0}}}; }

  // Throws std::invalid_argument unless weights are non-negative, sum to
  // 1 +- 1e-9, and prices are distinct and within [0, max_price].
  void validate(Ticks max_price) const;

  double probability_of(Ticks price) const;
};

// Profit-maximizing grid price in [0, price_max] for `seller` with every
// rival price held fixed. Ties go to the higher price.
Ticks myopic_best_response(std::size_t seller, std::span<const Ticks> prices,
                           Ticks marginal_cost, const MarketConfig& config);

struct DerivativeStep {
  Ticks price = 0;
  int direction = 1;
};

// Reverses direction iff profit strictly fell since the previous update,
// then moves one step, clamped to [lower, upper].
DerivativeStep derivative_follower_step(Ticks current_price, int direction,
                                        Ticks step, double profit_now,
                                        double profit_prev, Ticks lower,
                                        Ticks upper);

struct Deviation {
  std::size_t seller = 0;
  Ticks price = 0;
  double gain = 0.0;
};

struct NashCheck {
  bool is_nash = true;
  double worst_gain = 0.0;
  // Most profitable unilateral deviation, when any deviation gains.
  std::optional<Deviation> witness;
};

// Expected profit of `seller` at each grid price 0..max_ticks when rivals
// play the given mixed strategies (the seller's own entry is ignored).
std::vector<double> expected_profit_curve(std::size_t seller,
                                          std::span<const MixedStrategy> profile,
                                          Ticks marginal_cost,
                                          const MarketConfig& config);

// True iff no seller gains more than `eps` (money) from any unilateral
// deviation to a grid price.
NashCheck verify_epsilon_nash(std::span<const MixedStrategy> profile,
                              std::span<const Ticks> marginal_costs,
                              const MarketConfig& config, double eps);

// Simultaneous fictitious play: every iteration each seller best-responds to
// the empirical price frequencies of its rivals (ties to the lower price).
// Beliefs start from one seeded random price per seller; the returned
// frequencies count best-response plays only.
std::vector<MixedStrategy> fictitious_play(const MarketConfig& config,
                                           std::span<const Ticks> marginal_costs,
                                           int iterations, std::uint64_t seed);

}  // namespace shopbot

#endif  // SHOPBOT_PRICING_STRATEGIES_H_
