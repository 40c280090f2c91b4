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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "shopbot/simd/kernels.h"

namespace shopbot::simd {
namespace {

Isa initial_isa() {
  if (const char* forced = std::getenv("SHOPBOT_ISA")) {
    const std::string name(forced);
    for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon}) {
      if (name == isa_name(isa) && isa_supported(isa)) return isa;
    }
  }
  return best_supported_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
      return avx2::compiled() && __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
      return neon::compiled();
  }
  return false;
}

Isa best_supported_isa() {
  if (isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_supported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("ISA not supported: " + std::string(isa_name(isa)));
  }
  active().store(isa, std::memory_order_relaxed);
}

void profit_curve(const ProfitCurveParams& params, std::int64_t first_price,
                  std::span<double> out) {
  switch (active_isa()) {
    case Isa::kAvx2:
      return avx2::profit_curve(params, first_price, out);
    case Isa::kNeon:
      return neon::profit_curve(params, first_price, out);
    case Isa::kScalar:
      break;
  }
  scalar::profit_curve(params, first_price, out);
}

namespace {

Moments pick_moments(std::span<const double> values) {
  switch (active_isa()) {
    case Isa::kAvx2:
      return avx2::moments(values);
    case Isa::kNeon:
      return neon::moments(values);
    case Isa::kScalar:
      break;
  }
  return scalar::moments(values);
}

}  // namespace

Moments moments(std::span<const double> values) {
  Moments m = pick_moments(values);
  // A constant series has its value as mean, not a rounded sum over n.
  if (m.min == m.max) {
    m.mean = m.min;
    m.sum_sq_dev = 0.0;
  }
  return m;
}

std::size_t argmax_last(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmax_last: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] >= values[best]) best = i;
  }
  return best;
}

}  // namespace shopbot::simd
