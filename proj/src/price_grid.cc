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

#include "shopbot/price_grid.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace shopbot {
namespace {

constexpr double kGridTolerance = 1e-6;

int decimals_for(double tick) {
  double scale = 1.0;
  for (int d = 0; d <= 12; ++d) {
    const double scaled = tick * scale;
    if (std::fabs(scaled - std::round(scaled)) < 1e-9 * scale) return d;
    scale *= 10.0;
  }
  return 12;
}

}  // namespace

PriceGrid::PriceGrid(double tick) : tick_(tick), decimals_(0) {
  if (!(tick > 0.0) || !std::isfinite(tick)) {
    throw std::invalid_argument("price_tick must be a positive finite number");
  }
  decimals_ = decimals_for(tick);
}

Ticks PriceGrid::to_ticks(double money) const {
  const double scaled = money / tick_;
  const double nearest = std::round(scaled);
  if (!std::isfinite(scaled) || std::fabs(scaled - nearest) > kGridTolerance) {
    throw std::invalid_argument("price " + std::to_string(money) +
                                " is not a multiple of the price tick");
  }
  return static_cast<Ticks>(nearest);
}

Ticks PriceGrid::floor_ticks(double money) const {
  return static_cast<Ticks>(std::floor(money / tick_ + kGridTolerance));
}

bool PriceGrid::on_grid(double money) const {
  const double scaled = money / tick_;
  return std::isfinite(scaled) && std::fabs(scaled - std::round(scaled)) <= kGridTolerance;
}

std::string PriceGrid::format(Ticks t) const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals_, to_money(t));
  return buf;
}

}  // namespace shopbot
