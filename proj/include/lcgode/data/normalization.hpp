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

#pragma once

// Bounded sigmoid normalization of learning-curve values into [0, 1]:
//
//   g(x)    = cr(c / (1 + exp(-a (x - b))) + d)
//   g^-1(y) = b - log(c / (cr(y) - d) - 1) / a
//
// with cr(y) = 1 - y when minimizing and y otherwise. c and d are chosen so
// that g(l_hard) = 0 and g(u_hard) = 1 before the cr flip.

#include <span>
#include <vector>

#include "lcgode/data/curves.hpp"

namespace lcgode::data {

struct NormalizationParams {
  bool minimize = false;
  double l_hard = 0.0, u_hard = 1.0;
  double l_soft = 0.0, u_soft = 1.0;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  /// Derives a, b, c, d. Throws unless l_hard < u_hard and l_soft < u_soft.
  static NormalizationParams make(bool minimize, double l_hard, double u_hard, double l_soft, double u_soft);

  /// (False, 0, 1, 0, 1)
  static NormalizationParams accuracy();
  /// (True, 0, log 10, 0, max_first_epoch_log_loss)
  static NormalizationParams log_loss(double max_first_epoch);
};

double normalize_value(double x, const NormalizationParams& p);
double denormalize_value(double y, const NormalizationParams& p);

/// Values must lie in [l_hard, u_hard]; throws naming the first bad index.
std::vector<double> normalize_curve(std::span<const double> values, const NormalizationParams& p);
/// Values must lie strictly inside (0, 1); throws naming the first bad index.
std::vector<double> denormalize_curve(std::span<const double> values, const NormalizationParams& p);

}  // namespace lcgode::data
