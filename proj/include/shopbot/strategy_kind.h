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

#ifndef SHOPBOT_STRATEGY_KIND_H_
#define SHOPBOT_STRATEGY_KIND_H_

#include <variant>

#include "shopbot/price_grid.h"

namespace shopbot {

// Posts the same price forever.
struct FixedStrategy {
  Ticks price = 0;
};

// Steps the price by `step` ticks in `direction` until profit falls, then
// reverses.
struct DerivativeFollower {
  Ticks step = 1;
  int direction = -1;
  // Compare sampled (realized) profit instead of expected profit.
  bool sampled_profit = false;
};

// Best-responds to the current rival prices, assuming they stay fixed.
struct MyopicOptimal {};

using StrategyKind = std::variant<FixedStrategy, DerivativeFollower, MyopicOptimal>;

// Throws std::invalid_argument if the parameters are out of range.
void validate_strategy(const StrategyKind& strategy);

}  // namespace shopbot

#endif  // SHOPBOT_STRATEGY_KIND_H_
