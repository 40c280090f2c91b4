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

#include "shopbot/market_model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "shopbot/simd/kernels.h"

namespace shopbot {
namespace {

std::string num(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

void check_index(std::size_t seller, std::span<const Ticks> prices,
                 const MarketConfig& config) {
  if (prices.size() != static_cast<std::size_t>(config.num_sellers)) {
    throw std::invalid_argument("expected one price per seller (" +
                                std::to_string(config.num_sellers) + "), got " +
                                std::to_string(prices.size()));
  }
  if (seller >= prices.size()) {
    throw std::out_of_range("seller index " + std::to_string(seller) + " out of range");
  }
}

}  // namespace

void validate_valuation(const ValuationModel& vm) {
  if (const auto* c = std::get_if<ConstantValuation>(&vm)) {
    if (!(c->value > 0.0) || !std::isfinite(c->value)) {
      invalid("valuation.value", "must be positive (got " + num(c->value) + ")");
    }
    return;
  }
  const auto& u = std::get<UniformValuation>(vm);
  if (!(u.lo >= 0.0) || !std::isfinite(u.hi)) {
    invalid("valuation.lo", "must be >= 0 (got " + num(u.lo) + ")");
  }
  if (!(u.lo < u.hi)) {
    invalid("valuation.hi", "must exceed valuation.lo (got " + num(u.hi) + ")");
  }
}

double max_valuation(const ValuationModel& vm) {
  if (const auto* c = std::get_if<ConstantValuation>(&vm)) return c->value;
  return std::get<UniformValuation>(vm).hi;
}

Ticks MarketConfig::max_ticks() const { return grid().floor_ticks(price_max); }

void MarketConfig::validate() const {
  if (num_sellers < 1) invalid("num_sellers", "must be at least 1");
  if (buyers_per_tick < 0) invalid("buyers_per_tick", "must be non-negative");
  if (!(type1_fraction >= 0.0 && type1_fraction <= 1.0)) {
    invalid("type1_fraction", "must be in [0, 1] (got " + num(type1_fraction) + ")");
  }
  if (!(price_tick > 0.0) || !std::isfinite(price_tick)) {
    invalid("price_tick", "must be positive (got " + num(price_tick) + ")");
  }
  if (!(price_max > price_tick) || !std::isfinite(price_max)) {
    invalid("price_max", "must exceed price_tick (got " + num(price_max) + ")");
  }
  validate_valuation(valuation);
  if (price_max < max_valuation(valuation) * (1.0 - 1e-12)) {
    invalid("price_max", "must be at least the largest valuation (" +
                             num(max_valuation(valuation)) + ")");
  }
}

GridValuation GridValuation::from(const MarketConfig& config) {
  const PriceGrid grid = config.grid();
  GridValuation gv;
  if (const auto* c = std::get_if<ConstantValuation>(&config.valuation)) {
    gv.constant = true;
    gv.value_ticks = grid.floor_ticks(c->value);
  } else {
    const auto& u = std::get<UniformValuation>(config.valuation);
    gv.constant = false;
    gv.lo_ticks = u.lo / config.price_tick;
    gv.hi_ticks = u.hi / config.price_tick;
  }
  return gv;
}

double GridValuation::survival(Ticks price) const {
  const double t = static_cast<double>(price);
  if (constant) return t <= static_cast<double>(value_ticks) ? 1.0 : 0.0;
  double q = (hi_ticks - t) / (hi_ticks - lo_ticks);
  q = q < 0.0 ? 0.0 : q;
  q = q > 1.0 ? 1.0 : q;
  return q;
}

DemandCoefficients DemandCoefficients::from(const MarketConfig& config) {
  const double buyers = static_cast<double>(config.buyers_per_tick);
  return {buyers * config.type1_fraction / static_cast<double>(config.num_sellers),
          buyers * config.type2_fraction()};
}

double survival_probability(double price, const ValuationModel& vm) {
  if (!(price >= 0.0)) throw std::invalid_argument("price must be non-negative");
  if (const auto* c = std::get_if<ConstantValuation>(&vm)) {
    return price <= c->value ? 1.0 : 0.0;
  }
  const auto& u = std::get<UniformValuation>(vm);
  return std::clamp((u.hi - price) / (u.hi - u.lo), 0.0, 1.0);
}

DemandResult expected_demand(std::size_t seller, std::span<const Ticks> prices,
                             const MarketConfig& config) {
  check_index(seller, prices, config);
  const DemandCoefficients coef = DemandCoefficients::from(config);
  const double q = GridValuation::from(config).survival(prices[seller]);
  const Ticks lowest = *std::min_element(prices.begin(), prices.end());
  DemandResult d;
  d.type1_units = coef.type1_base * q;
  if (prices[seller] == lowest) {
    const auto tied = std::count(prices.begin(), prices.end(), lowest);
    d.type2_units = (coef.type2_base * q) / static_cast<double>(tied);
  }
  d.expected_units = d.type1_units + d.type2_units;
  return d;
}

double profit(std::size_t seller, std::span<const Ticks> prices,
              Ticks marginal_cost, const MarketConfig& config) {
  const DemandResult d = expected_demand(seller, prices, config);
  return margin_times_units(prices[seller], marginal_cost, config.price_tick,
                            d.expected_units);
}

std::size_t quantity_demanded(std::span<const double> valuations, double price) {
  if (!(price >= 0.0)) throw std::invalid_argument("price must be non-negative");
  return static_cast<std::size_t>(std::count_if(
      valuations.begin(), valuations.end(), [price](double v) { return v >= price; }));
}

UniformPrice optimal_uniform_price(std::span<const double> valuations,
                                   double marginal_cost) {
  if (valuations.empty()) throw std::invalid_argument("valuation list is empty");
  std::vector<double> candidates(valuations.begin(), valuations.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  UniformPrice best{candidates.front(), 0.0};
  bool first = true;
  for (double p : candidates) {
    const double pi =
        (p - marginal_cost) * static_cast<double>(quantity_demanded(valuations, p));
    if (first || pi > best.profit) {
      best = {p, pi};
      first = false;
    }
  }
  return best;
}

double perfect_discrimination_profit(std::span<const double> valuations,
                                     double marginal_cost) {
  double total = 0.0;
  for (double v : valuations) total += std::max(v - marginal_cost, 0.0);
  return total;
}

bool distribution_efficient(std::span<const double> mrs_values, double tol) {
  if (mrs_values.empty()) throw std::invalid_argument("MRS list is empty");
  if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
  const auto [lo, hi] = std::minmax_element(mrs_values.begin(), mrs_values.end());
  return *hi - *lo <= tol;
}

Dispersion price_dispersion(std::span<const double> prices) {
  if (prices.empty()) throw std::invalid_argument("price list is empty");
  for (double p : prices) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("prices must be positive (got " + num(p) + ")");
    }
  }
  const simd::Moments m = simd::moments(prices);
  Dispersion d;
  d.range_ratio = (m.max - m.min) / m.min;
  d.coeff_variation = std::sqrt(m.sum_sq_dev / static_cast<double>(m.count)) / m.mean;
  return d;
}

double consumer_surplus(std::span<const Transaction> transactions) {
  double total = 0.0;
  for (const Transaction& t : transactions) {
    if (t.price > t.valuation) {
      throw std::logic_error("transaction price " + num(t.price) +
                             " exceeds valuation " + num(t.valuation));
    }
    total += t.valuation - t.price;
  }
  return total;
}

double expected_consumer_surplus(std::span<const Ticks> prices,
                                 const MarketConfig& config) {
  double total = 0.0;
  for (std::size_t s = 0; s < prices.size(); ++s) {
    const DemandResult d = expected_demand(s, prices, config);
    if (d.expected_units == 0.0) continue;
    const double p = config.grid().to_money(prices[s]);
    double per_unit;
    if (const auto* c = std::get_if<ConstantValuation>(&config.valuation)) {
      per_unit = c->value - p;
    } else {
      const auto& u = std::get<UniformValuation>(config.valuation);
      per_unit = (std::max(p, u.lo) + u.hi) / 2.0 - p;
    }
    total += d.expected_units * per_unit;
  }
  return total;
}

}  // namespace shopbot
