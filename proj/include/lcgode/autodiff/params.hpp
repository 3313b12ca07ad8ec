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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lcgode/autodiff/matrix.hpp"
#include "lcgode/autodiff/tape.hpp"

namespace lcgode::ad {

/// Ordered, named collection of learnable tensors. A parameter's id is its
/// insertion index.
class ParamStore {
 public:
  std::size_t add(std::string name, Matrix value);

  std::size_t size() const { return values_.size(); }
  std::size_t id_of(std::string_view name) const;
  const std::string& name(std::size_t id) const { return names_.at(id); }
  const Matrix& value(std::size_t id) const { return values_.at(id); }
  Matrix& value(std::size_t id) { return values_.at(id); }
  std::span<const Matrix> values() const { return values_; }
  std::span<Matrix> values() { return values_; }
  std::size_t total_size() const;

  /// Record every parameter as a leaf on the tape; result is indexed by id.
  std::vector<Var> bind(Tape& tape) const;

  friend bool operator==(const ParamStore&, const ParamStore&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> values_;
};

/// dLoss/dParam for every parameter of a store, indexed by parameter id.
/// Parameters that did not influence the loss carry an all-zero entry.
struct Gradients {
  std::vector<Matrix> by_param;

  const Matrix& operator[](std::size_t id) const { return by_param.at(id); }
  bool all_finite() const;
};

/// Reverse pass from a 1x1 loss node. Leaves bound to parameter ids of
/// `params` receive their adjoint; calling twice yields identical results.
Gradients backward(const Tape& tape, Var loss, const ParamStore& params);

}  // namespace lcgode::ad
