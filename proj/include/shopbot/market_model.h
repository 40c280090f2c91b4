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

// Domain types and closed-form economics of the shopbot market: buyer
// valuations, expected per-seller demand from a mix of captive (type-1) and
// price-comparing (type-2) buyers, profit, and the small price-theory
// computations (uniform vs discriminatory pricing, dispersion, surplus).

#ifndef SHOPBOT_MARKET_MODEL_H_
#define SHOPBOT_MARKET_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "shopbot/price_grid.h"
#include "shopbot/strategy_kind.h"

namespace shopbot {

// Every buyer values the good at exactly `value`.
struct ConstantValuation {
  double value = 1.0;
};

// Buyer valuations are uniform on [lo, hi].
struct UniformValuation {
  double lo = 0.0;
  double hi = 1.0;
};

using ValuationModel = std::variant<ConstantValuation, UniformValuation>;

void validate_valuation(const ValuationModel& vm);
double max_valuation(const ValuationModel& vm);

struct MarketConfig {
  int num_sellers = 2;
  std::int64_t buyers_per_tick = 100;
  // Share of captive buyers; the remainder compare prices via a shopbot.
  double type1_fraction = 0.5;
  ValuationModel valuation = ConstantValuation{1.0};
  double price_tick = 0.01;
  double price_max = 1.0;

  double type2_fraction() const { return 1.0 - type1_fraction; }
  PriceGrid grid() const { return PriceGrid(price_tick); }
  Ticks max_ticks() const;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct Seller {
  int id = 0;
  Ticks marginal_cost = 0;
  StrategyKind strategy = MyopicOptimal{};
  Ticks current_price = 0;
  // Profit observed at this seller's previous update (derivative followers).
  double last_profit = 0.0;
  double update_weight = 1.0;
};

struct DemandResult {
  double expected_units = 0.0;
  double type1_units = 0.0;
  double type2_units = 0.0;
};

// Valuation model re-expressed in tick units. Survival probabilities used by
// the demand and profit-curve code all come from here so that every path
// evaluates the identical floating-point expression.
struct GridValuation {
  bool constant = true;
  Ticks value_ticks = 0;   // constant: buyers purchase iff price <= value
  double lo_ticks = 0.0;   // uniform support, in ticks
  double hi_ticks = 0.0;

  static GridValuation from(const MarketConfig& config);
  double survival(Ticks price) const;
};

// Per-buyer-class demand scale: type-1 units = type1_base * Q(p),
// type-2 units = type2_base * Q(p) / (sellers tied at the minimum).
struct DemandCoefficients {
  double type1_base = 0.0;
  double type2_base = 0.0;

  static DemandCoefficients from(const MarketConfig& config);
};

// Pr(valuation >= price).
double survival_probability(double price, const ValuationModel& vm);

// Throws std::out_of_range for a bad index and std::invalid_argument when
// `prices` does not hold one entry per seller.
DemandResult expected_demand(std::size_t seller, std::span<const Ticks> prices,
                             const MarketConfig& config);

double profit(std::size_t seller, std::span<const Ticks> prices,
              Ticks marginal_cost, const MarketConfig& config);

// Profit at `price` given the demand the seller faces there.
inline double margin_times_units(Ticks price, Ticks marginal_cost, double tick,
                                 double units) {
  return (static_cast<double>(price - marginal_cost) * tick) * units;
}

// Number of buyers whose valuation is at least `price`.
std::size_t quantity_demanded(std::span<const double> valuations, double price);

struct UniformPrice {
  double price = 0.0;
  double profit = 0.0;
};

// Best single posted price among the buyers' valuations; ties go to the
// lower price. Throws std::invalid_argument on an empty list.
UniformPrice optimal_uniform_price(std::span<const double> valuations,
                                   double marginal_cost);

// Profit when every buyer is charged exactly their valuation.
double perfect_discrimination_profit(std::span<const double> valuations,
                                     double marginal_cost);

// True iff all marginal rates of substitution agree within `tol`.
bool distribution_efficient(std::span<const double> mrs_values, double tol);

struct Dispersion {
  double range_ratio = 0.0;      // (max - min) / min
  double coeff_variation = 0.0;  // population stddev / mean
};

Dispersion price_dispersion(std::span<const double> prices);

struct Transaction {
  double valuation = 0.0;
  double price = 0.0;
};

// Sum of (valuation - price). Throws std::logic_error if any transaction has
// price above valuation.
double consumer_surplus(std::span<const Transaction> transactions);

// Expected buyer surplus for one tick at the given prices.
double expected_consumer_surplus(std::span<const Ticks> prices,
                                 const MarketConfig& config);

}  // namespace shopbot

#endif  // SHOPBOT_MARKET_MODEL_H_
