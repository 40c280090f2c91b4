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

#include <stdexcept>

#include "shopbot/simd/kernels.h"

#if defined(__aarch64__)
#include <arm_neon.h>
#define SHOPBOT_HAVE_NEON 1
#else
#define SHOPBOT_HAVE_NEON 0
#endif

namespace shopbot::simd::neon {

#if SHOPBOT_HAVE_NEON

bool compiled() { return true; }

namespace {

inline float64x2_t select(uint64x2_t mask, float64x2_t if_true, float64x2_t if_false) {
  return vbslq_f64(mask, if_true, if_false);
}

// Two float64x2 registers stand in for one 4-lane AVX2 register so that the
// reduction order matches the scalar reference.
struct Quad {
  float64x2_t lo;
  float64x2_t hi;
};

}  // namespace

void profit_curve(const ProfitCurveParams& p, std::int64_t first_price,
                  std::span<double> out) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t cost = vdupq_n_f64(static_cast<double>(p.marginal_cost));
  const float64x2_t tick = vdupq_n_f64(p.tick);
  const float64x2_t rival_min = vdupq_n_f64(static_cast<double>(p.rival_min));
  const float64x2_t tied = vdupq_n_f64(static_cast<double>(p.rival_min_count + 1));
  const float64x2_t value = vdupq_n_f64(static_cast<double>(p.value_ticks));
  const float64x2_t hi = vdupq_n_f64(p.hi_ticks);
  const float64x2_t width = vdupq_n_f64(p.hi_ticks - p.lo_ticks);
  const float64x2_t base1 = vdupq_n_f64(p.type1_base);
  const float64x2_t base2 = vdupq_n_f64(p.type2_base);
  const double lane_init[2] = {0.0, 1.0};
  const float64x2_t lane = vld1q_f64(lane_init);

  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const double start = static_cast<double>(first_price + static_cast<std::int64_t>(i));
    const float64x2_t t = vaddq_f64(vdupq_n_f64(start), lane);
    float64x2_t q;
    if (p.constant_valuation) {
      q = select(vcleq_f64(t, value), one, zero);
    } else {
      q = vdivq_f64(vsubq_f64(hi, t), width);
      q = select(vcltq_f64(q, zero), zero, q);
      q = select(vcgtq_f64(q, one), one, q);
    }
    const float64x2_t type1 = vmulq_f64(base1, q);
    const float64x2_t den = select(vcltq_f64(t, rival_min), one, tied);
    float64x2_t type2 = vdivq_f64(vmulq_f64(base2, q), den);
    type2 = select(vcgtq_f64(t, rival_min), zero, type2);
    const float64x2_t margin = vmulq_f64(vsubq_f64(t, cost), tick);
    vst1q_f64(out.data() + i, vmulq_f64(margin, vaddq_f64(type1, type2)));
  }
  if (i < n) {
    scalar::profit_curve(p, first_price + static_cast<std::int64_t>(i), out.subspan(i));
  }
}

Moments moments(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("moments: empty input");
  const std::size_t n = x.size();
  const std::size_t blocks = n / 4;
  Moments m;
  m.count = n;

  double init[4];
  for (int l = 0; l < 4; ++l) init[l] = x[l % n];
  Quad vsum{vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  Quad vmin{vld1q_f64(init), vld1q_f64(init + 2)};
  Quad vmax = vmin;
  for (std::size_t b = 0; b < blocks; ++b) {
    const float64x2_t a = vld1q_f64(x.data() + 4 * b);
    const float64x2_t c = vld1q_f64(x.data() + 4 * b + 2);
    vsum.lo = vaddq_f64(vsum.lo, a);
    vsum.hi = vaddq_f64(vsum.hi, c);
    vmin.lo = select(vcltq_f64(a, vmin.lo), a, vmin.lo);
    vmin.hi = select(vcltq_f64(c, vmin.hi), c, vmin.hi);
    vmax.lo = select(vcgtq_f64(a, vmax.lo), a, vmax.lo);
    vmax.hi = select(vcgtq_f64(c, vmax.hi), c, vmax.hi);
  }
  double s[4], lo4[4], hi4[4];
  vst1q_f64(s, vsum.lo);
  vst1q_f64(s + 2, vsum.hi);
  vst1q_f64(lo4, vmin.lo);
  vst1q_f64(lo4 + 2, vmin.hi);
  vst1q_f64(hi4, vmax.lo);
  vst1q_f64(hi4 + 2, vmax.hi);
  double sum = (s[0] + s[1]) + (s[2] + s[3]);
  double lo = lo4[0], hi = hi4[0];
  for (int l = 1; l < 4; ++l) {
    lo = lo4[l] < lo ? lo4[l] : lo;
    hi = hi4[l] > hi ? hi4[l] : hi;
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

  const float64x2_t mean = vdupq_n_f64(m.mean);
  Quad vdev{vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  for (std::size_t b = 0; b < blocks; ++b) {
    const float64x2_t a = vsubq_f64(vld1q_f64(x.data() + 4 * b), mean);
    const float64x2_t c = vsubq_f64(vld1q_f64(x.data() + 4 * b + 2), mean);
    vdev.lo = vaddq_f64(vdev.lo, vmulq_f64(a, a));
    vdev.hi = vaddq_f64(vdev.hi, vmulq_f64(c, c));
  }
  vst1q_f64(s, vdev.lo);
  vst1q_f64(s + 2, vdev.hi);
  double dev = (s[0] + s[1]) + (s[2] + s[3]);
  for (std::size_t i = 4 * blocks; i < n; ++i) {
    const double d = x[i] - m.mean;
    dev = dev + d * d;
  }
  m.sum_sq_dev = dev;
  return m;
}

#else

bool compiled() { return false; }

void profit_curve(const ProfitCurveParams&, std::int64_t, std::span<double>) {
  throw std::logic_error("NEON kernels not compiled into this build");
}

Moments moments(std::span<const double>) {
  throw std::logic_error("NEON kernels not compiled into this build");
}

#endif

}  // namespace shopbot::simd::neon
