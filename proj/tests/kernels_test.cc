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

#include "shopbot/simd/kernels.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"

namespace shopbot::simd {
namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

bool same_moments(const Moments& a, const Moments& b) {
  return a.count == b.count && same_bits(a.sum, b.sum) && same_bits(a.min, b.min) &&
         same_bits(a.max, b.max) && same_bits(a.mean, b.mean) &&
         same_bits(a.sum_sq_dev, b.sum_sq_dev);
}

ProfitCurveParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> ticks(0, 300);
  ProfitCurveParams p;
  p.marginal_cost = ticks(rng) / 3;
  p.tick = unit(rng) < 0.5 ? 0.01 : 0.05 + unit(rng);
  p.type1_base = 1000 * unit(rng);
  p.type2_base = 1000 * unit(rng);
  if (unit(rng) < 0.2) {
    p.rival_min = std::numeric_limits<std::int64_t>::max();
    p.rival_min_count = 0;
  } else {
    p.rival_min = ticks(rng);
    p.rival_min_count = 1 + ticks(rng) % 4;
  }
  p.constant_valuation = unit(rng) < 0.5;
  p.value_ticks = ticks(rng);
  p.lo_ticks = 100 * unit(rng);
  p.hi_ticks = p.lo_ticks + 1 + 250 * unit(rng);
  return p;
}

// Straightforward per-element definition of the profit curve.
double reference_profit(const ProfitCurveParams& p, std::int64_t price) {
  double q;
  if (p.constant_valuation) {
    q = price <= p.value_ticks ? 1.0 : 0.0;
  } else {
    q = std::min(1.0, std::max(0.0, (p.hi_ticks - price) / (p.hi_ticks - p.lo_ticks)));
  }
  double type2 = 0.0;
  if (price < p.rival_min) type2 = p.type2_base * q;
  if (price == p.rival_min) type2 = p.type2_base * q / static_cast<double>(p.rival_min_count + 1);
  return static_cast<double>(price - p.marginal_cost) * p.tick * (p.type1_base * q + type2);
}

TEST_CASE("scalar profit curve matches the per-element definition") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const ProfitCurveParams p = random_params(rng);
    std::vector<double> out(257);
    scalar::profit_curve(p, 3, out);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double want = reference_profit(p, 3 + static_cast<std::int64_t>(i));
      CHECK(out[i] == doctest::Approx(want).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("every supported variant is bit-identical to scalar") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> length(0, 300);
  std::uniform_int_distribution<std::int64_t> first(0, 40);
  std::uniform_real_distribution<double> value(-1e3, 1e3);
  const Isa saved = active_isa();
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (!isa_supported(isa)) continue;
    CAPTURE(std::string(isa_name(isa)));
    for (int trial = 0; trial < 500; ++trial) {
      const ProfitCurveParams p = random_params(rng);
      const std::int64_t start = first(rng);
      std::vector<double> want(length(rng));
      std::vector<double> got(want.size());
      scalar::profit_curve(p, start, want);
      set_active_isa(isa);
      profit_curve(p, start, got);
      REQUIRE(same_bits(want, got));

      std::vector<double> xs(1 + length(rng));
      for (double& x : xs) x = value(rng);
      const Moments m_want = scalar::moments(xs);
      const Moments m_got = moments(xs);
      REQUIRE(same_moments(m_want, m_got));
    }
  }
  set_active_isa(saved);
}

TEST_CASE("avx2 entry points agree with scalar when built") {
  if (!isa_supported(Isa::kAvx2)) return;
  std::mt19937_64 rng(3);
  for (int n = 0; n < 70; ++n) {
    const ProfitCurveParams p = random_params(rng);
    std::vector<double> a(n), b(n);
    scalar::profit_curve(p, 0, a);
    avx2::profit_curve(p, 0, b);
    CHECK(same_bits(a, b));
    if (n > 0) {
      std::vector<double> xs(n);
      for (int i = 0; i < n; ++i) xs[i] = std::sin(i * 1.7) * 100 + n;
      CHECK(same_moments(scalar::moments(xs), avx2::moments(xs)));
    }
  }
}

TEST_CASE("moments values") {
  const std::vector<double> xs = {1, 2, 3, 4, 5, 6, 7};
  const Moments m = moments(xs);
  CHECK(m.count == 7);
  CHECK(m.sum == 28.0);
  CHECK(m.min == 1.0);
  CHECK(m.max == 7.0);
  CHECK(m.mean == 4.0);
  CHECK(m.sum_sq_dev == 28.0);
  CHECK_THROWS_AS(moments(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(scalar::moments(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("argmax prefers the highest index on ties") {
  CHECK(argmax_last(std::vector<double>{1, 3, 2, 3}) == 3);
  CHECK(argmax_last(std::vector<double>{5}) == 0);
  CHECK(argmax_last(std::vector<double>{0, 0, 0}) == 2);
  CHECK(argmax_last(std::vector<double>{-1, -2}) == 0);
}

TEST_CASE("dispatch control") {
  const Isa saved = active_isa();
  CHECK(isa_supported(Isa::kScalar));
  set_active_isa(Isa::kScalar);
  CHECK(active_isa() == Isa::kScalar);
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (!isa_supported(isa)) CHECK_THROWS_AS(set_active_isa(isa), std::invalid_argument);
  }
  set_active_isa(saved);
  CHECK(isa_supported(best_supported_isa()));
}

TEST_CASE("environment override selects the startup variant") {
  const char* forced = std::getenv("SHOPBOT_ISA");
  if (forced == nullptr) return;
  const std::string name(forced);
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
    if (name == isa_name(isa) && isa_supported(isa)) CHECK(active_isa() == isa);
  }
}

}  // namespace
}  // namespace shopbot::simd
