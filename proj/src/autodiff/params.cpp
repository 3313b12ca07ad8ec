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

#include "lcgode/autodiff/params.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "lcgode/autodiff/errors.hpp"

namespace lcgode::ad {

std::size_t ParamStore::add(std::string name, Matrix value) {
  if (std::find(names_.begin(), names_.end(), name) != names_.end()) {
    throw Error(fmt::format("parameter '{}' registered twice", name));
  }
  names_.push_back(std::move(name));
  values_.push_back(std::move(value));
  return values_.size() - 1;
}

std::size_t ParamStore::id_of(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(fmt::format("unknown parameter '{}'", name));
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t ParamStore::total_size() const {
  std::size_t n = 0;
  for (const Matrix& m : values_) n += m.size();
  return n;
}

std::vector<Var> ParamStore::bind(Tape& tape) const {
  std::vector<Var> vars;
  vars.reserve(values_.size());
  for (std::size_t id = 0; id < values_.size(); ++id) vars.push_back(tape.parameter(id, values_[id]));
  return vars;
}

bool Gradients::all_finite() const {
  return std::all_of(by_param.begin(), by_param.end(), [](const Matrix& m) { return m.all_finite(); });
}

Gradients backward(const Tape& tape, Var loss, const ParamStore& params) {
  const std::vector<Matrix> adj = tape.adjoints(loss);
  Gradients grads;
  grads.by_param.reserve(params.size());
  for (std::size_t id = 0; id < params.size(); ++id) grads.by_param.emplace_back(params.value(id).shape());
  for (std::size_t node = 0; node < tape.size(); ++node) {
    const Node& n = tape.node(static_cast<std::uint32_t>(node));
    if (n.op != Op::leaf || n.param_id == kNoParam || adj[node].empty()) continue;
    if (n.param_id >= params.size()) throw Error(fmt::format("backward: parameter id {} out of range", n.param_id));
    Matrix& g = grads.by_param[n.param_id];
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += adj[node][i];
  }
  return grads;
}

}  // namespace lcgode::ad
