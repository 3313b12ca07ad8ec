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

#include "lcgode/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace lcgode::ad {
namespace {

double evaluate_at(const ScalarFn& fn, std::span<const Matrix> point) {
  Tape tape;
  std::vector<Var> inputs;
  inputs.reserve(point.size());
  for (const Matrix& m : point) inputs.push_back(tape.variable(m));
  return fn(tape, inputs).value().item();
}

}  // namespace

GradCheckReport grad_check_report(const ScalarFn& fn, std::span<const Matrix> point, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-4)) {
    throw GradCheckError(fmt::format("grad_check: eps {} outside [1e-7, 1e-4]", eps));
  }

  Tape tape;
  std::vector<Var> inputs;
  for (const Matrix& m : point) inputs.push_back(tape.variable(m));
  const Var loss = fn(tape, inputs);
  if (!std::isfinite(loss.value().item())) throw GradCheckError("grad_check: non-finite value at the base point");
  const std::vector<Matrix> adj = tape.adjoints(loss);

  GradCheckReport report;
  std::vector<Matrix> probe(point.begin(), point.end());
  for (std::size_t in = 0; in < point.size(); ++in) {
    const Matrix& analytic = adj[inputs[in].id()];
    for (std::size_t i = 0; i < point[in].size(); ++i) {
      const double x0 = point[in][i];
      probe[in][i] = x0 + eps;
      const double fp = evaluate_at(fn, probe);
      probe[in][i] = x0 - eps;
      const double fm = evaluate_at(fn, probe);
      probe[in][i] = x0;
      if (!std::isfinite(fp) || !std::isfinite(fm)) {
        throw GradCheckError(fmt::format("grad_check: non-finite value perturbing input {} coordinate {}", in, i));
      }
      const double numeric = (fp - fm) / (2.0 * eps);
      const double a = analytic.empty() ? 0.0 : analytic[i];
      const double rel = std::abs(a - numeric) / std::max(1.0, std::abs(a));
      if (rel > report.max_relative_error || (in == 0 && i == 0)) {
        report.max_relative_error = std::max(report.max_relative_error, rel);
        report.worst_input = in;
        report.worst_index = i;
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

double grad_check(const ScalarFn& fn, std::span<const Matrix> point, double eps) {
  return grad_check_report(fn, point, eps).max_relative_error;
}

}  // namespace lcgode::ad
