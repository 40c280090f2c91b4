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

// Reference implementations. The SIMD variants mirror these operation for
// operation; any change here must be made to kernels_avx2.cc and
// kernels_neon.cc as well (kernels_test checks bitwise equality).

#include <stdexcept>

#include "shopbot/simd/kernels.h"

namespace shopbot::simd::scalar {

void profit_curve(const ProfitCurveParams& p, std::int64_t first_price,
                  std::span<double> out) {
  const double cost = static_cast<double>(p.marginal_cost);
  const double rival_min = static_cast<double>(p.rival_min);
  const double tied = static_cast<double>(p.rival_min_count + 1);
  const double value = static_cast<double>(p.value_ticks);
  const double width = p.hi_ticks - p.lo_ticks;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = static_cast<double>(first_price + static_cast<std::int64_t>(i));
    double q;
    if (p.constant_valuation) {
      q = t <= value ? 1.0 : 0.0;
    } else {
      q = (p.hi_ticks - t) / width;
      q = q < 0.0 ? 0.0 : q;
      q = q > 1.0 ? 1.0 : q;
    }
    const double type1 = p.type1_base * q;
    const double den = t < rival_min ? 1.0 : tied;
    double type2 = (p.type2_base * q) / den;
    if (t > rival_min) type2 = 0.0;
    out[i] = ((t - cost) * p.tick) * (type1 + type2);
  }
}

Moments moments(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("moments: empty input");
  const std::size_t n = x.size();
  const std::size_t blocks = n / 4;
  Moments m;
  m.count = n;

  double lane_sum[4] = {0.0, 0.0, 0.0, 0.0};
  double lane_min[4], lane_max[4];
  for (int l = 0; l < 4; ++l) lane_min[l] = lane_max[l] = x[l % n];
  for (std::size_t b = 0; b < blocks; ++b) {
    for (int l = 0; l < 4; ++l) {
      const double v = x[4 * b + l];
      lane_sum[l] = lane_sum[l] + v;
      lane_min[l] = v < lane_min[l] ? v : lane_min[l];
      lane_max[l] = v > lane_max[l] ? v : lane_max[l];
    }
  }
  double sum = (lane_sum[0] + lane_sum[1]) + (lane_sum[2] + lane_sum[3]);
  double lo = lane_min[0], hi = lane_max[0];
  for (int l = 1; l < 4; ++l) {
    lo = lane_min[l] < lo ? lane_min[l] : lo;
    hi = lane_max[l] > hi ? lane_max[l] : hi;
  }
  for (std::size_t i = 4 * blocks; i < n; ++i) {
    sum = sum + x[i];
    lo = x[i] < lo ? x[i] : lo;
    hi = x[i] > hi ? x[i] : hi;
  }
  m.sum = sum;
  m.min = lo;
  m.max = hi;
  m.mean = sum / static_cast<double>(n);

  double lane_dev[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t b = 0; b < blocks; ++b) {
    for (int l = 0; l < 4; ++l) {
      const double d = x[4 * b + l] - m.mean;
      lane_dev[l] = lane_dev[l] + d * d;
    }
  }
  double dev = (lane_dev[0] + lane_dev[1]) + (lane_dev[2] + lane_dev[3]);
  for (std::size_t i = 4 * blocks; i < n; ++i) {
    const double d = x[i] - m.mean;
    dev = dev + d * d;
  }
  m.sum_sq_dev = dev;
  return m;
}

}  // namespace shopbot::simd::scalar
