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

#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "lcgode/autodiff/errors.hpp"
#include "lcgode/graph/architecture_graph.hpp"

namespace lcgode::data {

class DataError : public Error {
 public:
  using Error::Error;
};

enum class Metric { test_loss, test_accuracy };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view text);
/// Loss is minimized, accuracy maximized.
inline bool minimize(Metric m) { return m == Metric::test_loss; }

/// Epoch times t_i = i * t_max / m for i = 1..m.
std::vector<double> time_grid(std::size_t m, double t_max);

struct LearningCurve {
  Metric metric = Metric::test_loss;
  std::vector<double> values;
  double t_max = 1.0;

  std::size_t m() const { return values.size(); }
  double dt() const { return t_max / static_cast<double>(values.size()); }
  std::vector<double> times() const { return time_grid(m(), t_max); }
  /// Accuracy in [0, 1], loss > 0, all finite, m >= 1, t_max > 0.
  void validate() const;

  friend bool operator==(const LearningCurve&, const LearningCurve&) = default;
};

/// One training configuration with its recorded curves.
struct Trial {
  std::string trial_id;
  graph::ArchitectureGraph graph;
  nlohmann::json hyperparams = nlohmann::json::object();
  std::map<Metric, LearningCurve> curves;

  const LearningCurve& curve(Metric m) const;
  friend bool operator==(const Trial&, const Trial&) = default;
};

using Dataset = std::vector<Trial>;

}  // namespace lcgode::data
