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

// Reconstruction, ranking and cost metrics.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcgode/autodiff/errors.hpp"

namespace lcgode::eval {

class MetricError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kMapeGuard = 1e-8;

struct MapeResult {
  double value = 0.0;
  /// True when some |y| fell below the guard and the denominator was clamped.
  bool guarded = false;
};

MapeResult mape_checked(std::span<const double> truth, std::span<const double> pred);
double mape(std::span<const double> truth, std::span<const double> pred);
double rmse(std::span<const double> truth, std::span<const double> pred);

struct RankingEntry {
  std::string trial_id;
  double predicted_best = 0.0;
  double true_best = 0.0;
};

struct RankingResult {
  std::size_t picked = 0;  // index into the input
  double regret = 0.0;
  std::size_t ranking = 1;
};

/// Predicted optimum over the observed prefix followed by the predicted window;
/// true optimum over the whole true curve.
RankingEntry ranking_entry(std::string trial_id, std::span<const double> observed, std::span<const double> predicted,
                           std::span<const double> truth, bool minimize);

/// argbest over predicted optima (ties by smallest trial_id); regret against the
/// best true optimum; ranking = 1 + number of trials with a strictly better true optimum.
RankingResult regret_and_ranking(std::span<const RankingEntry> trials, bool minimize);

struct Correlation {
  std::optional<double> pearson;  // empty when a variance is zero
  std::optional<double> kendall;  // tau-b; empty when either side is all ties
};

Correlation rank_correlation(std::span<const double> truth, std::span<const double> pred);
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y);

double speedup(double full_time, double cond_time, double inference_time);

/// Best value of a curve under the metric direction.
double curve_optimum(std::span<const double> values, bool minimize);

}  // namespace lcgode::eval
