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

#ifndef SHOPBOT_PRICE_GRID_H_
#define SHOPBOT_PRICE_GRID_H_

#include <cstdint>
#include <string>

namespace shopbot {

// A price expressed as an integer number of price ticks. All seller prices
// and costs live on the tick grid so that undercutting by "one tick" and
// argmax tie-breaking are exact.
using Ticks = std::int64_t;

// Converts between money amounts and grid ticks for a fixed tick size.
class PriceGrid {
 public:
  explicit PriceGrid(double tick);

  double tick() const { return tick_; }
  double to_money(Ticks t) const { return static_cast<double>(t) * tick_; }

  // Nearest grid point. Throws std::invalid_argument when `money` is further
  // than 1e-6 ticks from a grid point.
  Ticks to_ticks(double money) const;

  // Largest grid point not above `money` (tolerant of representation error).
  Ticks floor_ticks(double money) const;

  bool on_grid(double money) const;

  // Fixed-decimal rendering with as many decimals as the tick needs, so that
  // 99 ticks of 0.01 prints as "0.99" instead of "0.9900000000000001".
  std::string format(Ticks t) const;
  int decimals() const { return decimals_; }

 private:
  double tick_;
  int decimals_;
};

}  // namespace shopbot

#endif  // SHOPBOT_PRICE_GRID_H_
