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

#include <functional>
#include <span>
#include <vector>

#include "lcgode/autodiff/errors.hpp"
#include "lcgode/autodiff/tape.hpp"

namespace lcgode::ad {

/// Builds a scalar on the given tape from differentiable inputs.
using ScalarFn = std::function<Var(Tape&, std::span<const Var>)>;

class GradCheckError : public Error {
 public:
  using Error::Error;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compare reverse-mode gradients against central finite differences.
/// Relative error per coordinate is |analytic - fd| / max(1, |analytic|).
/// eps must lie in [1e-7, 1e-4].
GradCheckReport grad_check_report(const ScalarFn& fn, std::span<const Matrix> point, double eps);

double grad_check(const ScalarFn& fn, std::span<const Matrix> point, double eps);

}  // namespace lcgode::ad
