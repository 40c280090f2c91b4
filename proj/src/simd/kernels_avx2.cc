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

#if defined(__x86_64__) && defined(__AVX2__)
#include <immintrin.h>
#define SHOPBOT_HAVE_AVX2 1
#else
#define SHOPBOT_HAVE_AVX2 0
#endif

namespace shopbot::simd::avx2 {

#if SHOPBOT_HAVE_AVX2

bool compiled() { return true; }

void profit_curve(const ProfitCurveParams& p, std::int64_t first_price,
                  std::span<double> out) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d cost = _mm256_set1_pd(static_cast<double>(p.marginal_cost));
  const __m256d tick = _mm256_set1_pd(p.tick);
  const __m256d rival_min = _mm256_set1_pd(static_cast<double>(p.rival_min));
  const __m256d tied = _mm256_set1_pd(static_cast<double>(p.rival_min_count + 1));
  const __m256d value = _mm256_set1_pd(static_cast<double>(p.value_ticks));
  const __m256d hi = _mm256_set1_pd(p.hi_ticks);
  const __m256d width = _mm256_set1_pd(p.hi_ticks - p.lo_ticks);
  const __m256d base1 = _mm256_set1_pd(p.type1_base);
  const __m256d base2 = _mm256_set1_pd(p.type2_base);
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);

  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double start = static_cast<double>(first_price + static_cast<std::int64_t>(i));
    const __m256d t = _mm256_add_pd(_mm256_set1_pd(start), lane);
    __m256d q;
    if (p.constant_valuation) {
      q = _mm256_and_pd(_mm256_cmp_pd(t, value, _CMP_LE_OQ), one);
    } else {
      q = _mm256_div_pd(_mm256_sub_pd(hi, t), width);
      q = _mm256_blendv_pd(q, zero, _mm256_cmp_pd(q, zero, _CMP_LT_OQ));
      q = _mm256_blendv_pd(q, one, _mm256_cmp_pd(q, one, _CMP_GT_OQ));
    }
    const __m256d type1 = _mm256_mul_pd(base1, q);
    const __m256d den = _mm256_blendv_pd(tied, one, _mm256_cmp_pd(t, rival_min, _CMP_LT_OQ));
    __m256d type2 = _mm256_div_pd(_mm256_mul_pd(base2, q), den);
    type2 = _mm256_blendv_pd(type2, zero, _mm256_cmp_pd(t, rival_min, _CMP_GT_OQ));
    const __m256d margin = _mm256_mul_pd(_mm256_sub_pd(t, cost), tick);
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(margin, _mm256_add_pd(type1, type2)));
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

  alignas(32) double init[4];
  for (int l = 0; l < 4; ++l) init[l] = x[l % n];
  __m256d vsum = _mm256_setzero_pd();
  __m256d vmin = _mm256_load_pd(init);
  __m256d vmax = vmin;
  for (std::size_t b = 0; b < blocks; ++b) {
    const __m256d v = _mm256_loadu_pd(x.data() + 4 * b);
    vsum = _mm256_add_pd(vsum, v);
    vmin = _mm256_blendv_pd(vmin, v, _mm256_cmp_pd(v, vmin, _CMP_LT_OQ));
    vmax = _mm256_blendv_pd(vmax, v, _mm256_cmp_pd(v, vmax, _CMP_GT_OQ));
  }
  alignas(32) double s[4], lo4[4], hi4[4];
  _mm256_store_pd(s, vsum);
  _mm256_store_pd(lo4, vmin);
  _mm256_store_pd(hi4, vmax);
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

  const __m256d mean = _mm256_set1_pd(m.mean);
  __m256d vdev = _mm256_setzero_pd();
  for (std::size_t b = 0; b < blocks; ++b) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + 4 * b), mean);
    vdev = _mm256_add_pd(vdev, _mm256_mul_pd(d, d));
  }
  _mm256_store_pd(s, vdev);
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
  throw std::logic_error("AVX2 kernels not compiled into this build");
}

Moments moments(std::span<const double>) {
  throw std::logic_error("AVX2 kernels not compiled into this build");
}

#endif

}  // namespace shopbot::simd::avx2
