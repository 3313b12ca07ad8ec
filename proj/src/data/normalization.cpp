// Copyright 2026 The lcgode Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lcgode/data/normalization.hpp"

#include <cmath>
#include <fmt/format.h>

namespace lcgode::data {

NormalizationParams NormalizationParams::make(bool minimize, double l_hard, double u_hard, double l_soft,
                                              double u_soft) {
  if (!(l_hard < u_hard)) throw DataError(fmt::format("normalization: l_hard {} must be < u_hard {}", l_hard, u_hard));
  if (!(l_soft < u_soft)) throw DataError(fmt::format("normalization: l_soft {} must be < u_soft {}", l_soft, u_soft));
  NormalizationParams p{minimize, l_hard, u_hard, l_soft, u_soft};
  p.a = 2.0 / (u_soft - l_soft);
  p.b = -(u_soft + l_soft) / (u_soft - l_soft);
  const double eu = std::exp(-p.a * (u_hard - p.b));
  const double el = std::exp(-p.a * (l_hard - p.b));
  const double eul = std::exp(-p.a * (u_hard + l_hard - 2.0 * p.b));
  p.c = (1.0 + eu + el + eul) / (el - eu);
  // Negative sign: this is the offset for which g(l_hard) = 0 and g(u_hard) = 1.
  p.d = -p.c / (1.0 + el);
  return p;
}

NormalizationParams NormalizationParams::accuracy() { return make(false, 0.0, 1.0, 0.0, 1.0); }

NormalizationParams NormalizationParams::log_loss(double max_first_epoch) {
  return make(true, 0.0, std::log(10.0), 0.0, max_first_epoch);
}

namespace {
double flip(double y, const NormalizationParams& p) { return p.minimize ? 1.0 - y : y; }
}  // namespace

double normalize_value(double x, const NormalizationParams& p) {
  return flip(p.c / (1.0 + std::exp(-p.a * (x - p.b))) + p.d, p);
}

double denormalize_value(double y, const NormalizationParams& p) {
  const double s = flip(y, p) - p.d;
  // c / s - 1 written as (c - s) / s to keep precision near the upper bound.
  return p.b - std::log((p.c - s) / s) / p.a;
}

std::vector<double> normalize_curve(std::span<const double> values, const NormalizationParams& p) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = values[i];
    if (!(x >= p.l_hard && x <= p.u_hard)) {
      throw DataError(fmt::format("normalize: value {} at index {} outside hard bounds [{}, {}]", x, i, p.l_hard, p.u_hard));
    }
    out[i] = normalize_value(x, p);
  }
  return out;
}

std::vector<double> denormalize_curve(std::span<const double> values, const NormalizationParams& p) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double y = values[i];
    if (!(y > 0.0 && y < 1.0)) {
      throw DataError(fmt::format("denormalize: value {} at index {} is not inside (0, 1)", y, i));
    }
    out[i] = denormalize_value(y, p);
  }
  return out;
}

}  // namespace lcgode::data
