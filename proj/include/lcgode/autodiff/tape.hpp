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

// Define-by-run reverse-mode differentiation over dense matrices.
//
// A Tape records every primitive as a node whose inputs all have smaller ids,
// so the node list is already in topological order. Nodes cache their forward
// value; backward walks the list once in reverse. A Tape is single-threaded.
//
// Broadcasting (add/sub/mul): operands must have equal shapes, or one of them
// may be 1x1, 1xc or rx1 against an r x c partner.
//
// relu'(0) is defined as 0.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "lcgode/autodiff/matrix.hpp"

namespace lcgode::ad {

enum class Op : std::uint8_t {
  leaf,
  matmul,
  add,
  sub,
  mul,
  scale,
  add_scalar,
  sigmoid,
  tanh,
  relu,
  softplus,
  exp,
  log,
  square,
  pow,
  sum,
  mean,
  sum_rows,
  mean_rows,
  max_rows,
  row_sum,
  softmax,
  concat_cols,
  concat_rows,
  slice_cols,
  element,
  transpose,
  broadcast_to,
};

const char* op_name(Op op);

inline constexpr std::size_t kNoParam = std::numeric_limits<std::size_t>::max();

struct Node {
  Op op = Op::leaf;
  std::vector<std::uint32_t> inputs;
  double attr = 0.0;
  std::size_t index0 = 0;  // slice start / element row / broadcast rows
  std::size_t index1 = 0;  // slice count / element col / broadcast cols
  std::size_t param_id = kNoParam;
  Matrix value;
};

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape& tape() const { return *tape_; }
  std::uint32_t id() const { return id_; }
  const Matrix& value() const;
  Shape shape() const { return value().shape(); }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Non-differentiated input.
  Var constant(Matrix value);
  /// Differentiable leaf without a parameter id (grad-check inputs, tests).
  Var variable(Matrix value);
  /// Leaf bound to a parameter id; its adjoint is reported in Gradients.
  Var parameter(std::size_t param_id, Matrix value);

  Var record(Op op, std::vector<std::uint32_t> inputs, double attr = 0.0, std::size_t index0 = 0,
             std::size_t index1 = 0);

  const Node& node(std::uint32_t id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  std::span<const Node> nodes() const { return nodes_; }

  /// Recompute every non-leaf value from the leaves using the same kernels.
  std::vector<Matrix> replay() const;

  /// Adjoint d(loss)/d(node) for every node; empty matrices mark nodes that do
  /// not influence the loss. loss must be 1x1. The tape is not modified.
  std::vector<Matrix> adjoints(Var loss) const;

 private:
  std::vector<Node> nodes_;
};

/// Compute the forward value of a non-leaf node from its inputs' values.
Matrix evaluate(const Node& node, std::span<const Matrix* const> inputs);

// Primitive operations. Each records one node.
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var softplus(Var a);
Var exp(Var a);
Var log(Var a);
Var square(Var a);
Var pow(Var a, double p);
/// Sum / mean of all entries -> 1x1.
Var sum(Var a);
Var mean(Var a);
/// Reduce over rows -> 1 x cols.
Var sum_rows(Var a);
Var mean_rows(Var a);
Var max_rows(Var a);
/// Reduce over columns -> rows x 1.
Var row_sum(Var a);
/// Softmax of each column over its rows.
Var softmax(Var a);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var slice_cols(Var a, std::size_t start, std::size_t count);
Var element(Var a, std::size_t r, std::size_t c);
Var transpose(Var a);
Var broadcast_to(Var a, Shape shape);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator*(double s, Var a) { return scale(a, s); }
inline Var operator*(Var a, double s) { return scale(a, s); }
inline Var operator+(Var a, double s) { return add_scalar(a, s); }
inline Var operator-(Var a) { return scale(a, -1.0); }
inline Var operator-(double s, Var a) { return add_scalar(scale(a, -1.0), s); }

}  // namespace lcgode::ad
