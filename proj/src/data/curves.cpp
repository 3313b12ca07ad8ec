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

#include "lcgode/data/curves.hpp"

#include <cmath>
#include <fmt/format.h>

namespace lcgode::data {

std::string_view to_string(Metric m) { return m == Metric::test_loss ? "test_loss" : "test_accuracy"; }

Metric parse_metric(std::string_view text) {
  if (text == "test_loss") return Metric::test_loss;
  if (text == "test_accuracy") return Metric::test_accuracy;
  throw DataError(fmt::format("unknown metric '{}' (expected test_loss or test_accuracy)", text));
}

std::vector<double> time_grid(std::size_t m, double t_max) {
  std::vector<double> t(m);
  const double dt = t_max / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) t[i] = static_cast<double>(i + 1) * dt;
  return t;
}

void LearningCurve::validate() const {
  if (values.empty()) throw DataError("learning curve has no values");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DataError(fmt::format("learning curve t_max {} is not positive", t_max));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) throw DataError(fmt::format("{} value {} is not finite", to_string(metric), i));
    if (metric == Metric::test_accuracy && (v < 0.0 || v > 1.0)) {
      throw DataError(fmt::format("test_accuracy value {} = {} outside [0, 1]", i, v));
    }
    if (metric == Metric::test_loss && !(v > 0.0)) {
      throw DataError(fmt::format("test_loss value {} = {} is not positive", i, v));
    }
  }
}

const LearningCurve& Trial::curve(Metric m) const {
  const auto it = curves.find(m);
  if (it == curves.end()) throw DataError(fmt::format("trial '{}' has no {} curve", trial_id, to_string(m)));
  return it->second;
}

}  // namespace lcgode::data
