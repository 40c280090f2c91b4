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

// Data-parallel inner loops with a scalar reference implementation and
// AVX2 / NEON variants. The variants evaluate exactly the same per-element
// expression sequence (and reductions use the same 4-lane striping) as the
// scalar code, so every variant is bit-identical to the reference.
//
// The active variant is chosen once at startup from CPU features; it can be
// pinned with set_active_isa() or the SHOPBOT_ISA environment variable
// ("scalar", "avx2", "neon").

#ifndef SHOPBOT_SIMD_KERNELS_H_
#define SHOPBOT_SIMD_KERNELS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace shopbot::simd {

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
Isa best_supported_isa();
Isa active_isa();
// Throws std::invalid_argument if `isa` is not supported on this CPU/build.
void set_active_isa(Isa isa);

// Inputs for evaluating one seller's profit at every candidate grid price,
// with rival prices held fixed.
struct ProfitCurveParams {
  std::int64_t marginal_cost = 0;  // ticks
  double tick = 0.01;
  double type1_base = 0.0;
  double type2_base = 0.0;
  // Lowest rival price (ticks) and how many rivals post it. With no rivals
  // use INT64_MAX and 0.
  std::int64_t rival_min = INT64_MAX;
  std::int64_t rival_min_count = 0;
  bool constant_valuation = true;
  std::int64_t value_ticks = 0;
  double lo_ticks = 0.0;
  double hi_ticks = 0.0;
};

// out[i] = profit at price (first_price + i) ticks.
void profit_curve(const ProfitCurveParams& params, std::int64_t first_price,
                  std::span<double> out);

struct Moments {
  std::size_t count = 0;
  double sum = 0.0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  // Sum of squared deviations from the mean (two-pass).
  double sum_sq_dev = 0.0;
};

// Throws std::invalid_argument on an empty input.
Moments moments(std::span<const double> values);

// Index of the maximum; ties resolve to the highest index.
std::size_t argmax_last(std::span<const double> values);

namespace scalar {
void profit_curve(const ProfitCurveParams& params, std::int64_t first_price,
                  std::span<double> out);
Moments moments(std::span<const double> values);
}  // namespace scalar

namespace avx2 {
bool compiled();
void profit_curve(const ProfitCurveParams& params, std::int64_t first_price,
                  std::span<double> out);
Moments moments(std::span<const double> values);
}  // namespace avx2

namespace neon {
bool compiled();
void profit_curve(const ProfitCurveParams& params, std::int64_t first_price,
                  std::span<double> out);
Moments moments(std::span<const double> values);
}  // namespace neon

}  // namespace shopbot::simd

#endif  // SHOPBOT_SIMD_KERNELS_H_
