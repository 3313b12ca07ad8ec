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

#include "lcgode/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <utility>

namespace lcgode::eval {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* what, std::size_t min_len) {
  if (a.size() != b.size()) throw MetricError(fmt::format("{}: length mismatch {} vs {}", what, a.size(), b.size()));
  if (a.size() < min_len) throw MetricError(fmt::format("{}: need at least {} values, got {}", what, min_len, a.size()));
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

MapeResult mape_checked(std::span<const double> truth, std::span<const double> pred) {
  check_lengths(truth, pred, "mape", 1);
  MapeResult out;
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double denom = std::abs(truth[i]);
    if (denom < kMapeGuard) out.guarded = true;
    total += std::abs((truth[i] - pred[i]) / std::max(denom, kMapeGuard));
  }
  out.value = total / static_cast<double>(truth.size());
  return out;
}

double mape(std::span<const double> truth, std::span<const double> pred) { return mape_checked(truth, pred).value; }

double rmse(std::span<const double> truth, std::span<const double> pred) {
  check_lengths(truth, pred, "rmse", 1);
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double r = truth[i] - pred[i];
    total += r * r;
  }
  return std::sqrt(total / static_cast<double>(truth.size()));
}

RankingEntry ranking_entry(std::string trial_id, std::span<const double> observed, std::span<const double> predicted,
                           std::span<const double> truth, bool minimize) {
  std::vector<double> full(observed.begin(), observed.end());
  full.insert(full.end(), predicted.begin(), predicted.end());
  return {std::move(trial_id), curve_optimum(full, minimize), curve_optimum(truth, minimize)};
}

RankingResult regret_and_ranking(std::span<const RankingEntry> trials, bool minimize) {
  if (trials.empty()) throw MetricError("regret_and_ranking: no trials");
  auto better = [minimize](double a, double b) { return minimize ? a < b : a > b; };
  RankingResult out;
  std::size_t picked = 0;
  std::size_t truth_best = 0;
  for (std::size_t i = 1; i < trials.size(); ++i) {
    const auto& t = trials[i];
    const auto& p = trials[picked];
    if (better(t.predicted_best, p.predicted_best) ||
        (t.predicted_best == p.predicted_best && t.trial_id < p.trial_id)) {
      picked = i;
    }
    if (better(t.true_best, trials[truth_best].true_best)) truth_best = i;
  }
  out.picked = picked;
  out.regret = std::abs(trials[truth_best].true_best - trials[picked].true_best);
  for (const auto& t : trials) {
    if (better(t.true_best, trials[picked].true_best)) ++out.ranking;
  }
  return out;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y, "pearson", 2);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y, "kendall", 2);
  // Integer pair counts keep the result exact for the brute-force comparison.
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const int sx = sign(x[i] - x[j]);
      const int sy = sign(y[i] - y[j]);
      if (sx == 0 && sy == 0) continue;
      if (sx == 0) {
        ++ties_x;
      } else if (sy == 0) {
        ++ties_y;
      } else if (sx == sy) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double n1 = static_cast<double>(concordant + discordant + ties_x);
  const double n2 = static_cast<double>(concordant + discordant + ties_y);
  if (n1 == 0.0 || n2 == 0.0) return std::nullopt;
  return static_cast<double>(concordant - discordant) / std::sqrt(n1 * n2);
}

Correlation rank_correlation(std::span<const double> truth, std::span<const double> pred) {
  return {pearson(truth, pred), kendall_tau_b(truth, pred)};
}

double speedup(double full_time, double cond_time, double inference_time) {
  const double denom = cond_time + inference_time;
  if (!(denom > 0.0)) throw MetricError("speedup: conditioning plus inference time must be positive");
  return full_time / denom;
}

double curve_optimum(std::span<const double> values, bool minimize) {
  if (values.empty()) throw MetricError("curve_optimum: empty curve");
  return minimize ? *std::min_element(values.begin(), values.end()) : *std::max_element(values.begin(), values.end());
}

}  // namespace lcgode::eval
