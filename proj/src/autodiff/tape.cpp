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

#include "lcgode/autodiff/tape.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "lcgode/autodiff/errors.hpp"
#include "lcgode/simd/kernels.hpp"

namespace lcgode::ad {

const char* op_name(Op op) {
  switch (op) {
    case Op::leaf: return "leaf";
    case Op::matmul: return "matmul";
    case Op::add: return "add";
    case Op::sub: return "sub";
    case Op::mul: return "mul";
    case Op::scale: return "scale";
    case Op::add_scalar: return "add_scalar";
    case Op::sigmoid: return "sigmoid";
    case Op::tanh: return "tanh";
    case Op::relu: return "relu";
    case Op::softplus: return "softplus";
    case Op::exp: return "exp";
    case Op::log: return "log";
    case Op::square: return "square";
    case Op::pow: return "pow";
    case Op::sum: return "sum";
    case Op::mean: return "mean";
    case Op::sum_rows: return "sum_rows";
    case Op::mean_rows: return "mean_rows";
    case Op::max_rows: return "max_rows";
    case Op::row_sum: return "row_sum";
    case Op::softmax: return "softmax";
    case Op::concat_cols: return "concat_cols";
    case Op::concat_rows: return "concat_rows";
    case Op::slice_cols: return "slice_cols";
    case Op::element: return "element";
    case Op::transpose: return "transpose";
    case Op::broadcast_to: return "broadcast_to";
  }
  return "?";
}

const Matrix& Var::value() const { return tape_->node(id_).value; }

namespace {

std::size_t broadcast_dim(std::size_t x, std::size_t y, Op op, Shape a, Shape b) {
  if (x == y) return x;
  if (x == 1) return y;
  if (y == 1) return x;
  throw ShapeError(fmt::format("{}: shapes {} and {} do not broadcast", op_name(op), to_string(a), to_string(b)));
}

Shape broadcast_shape(Shape a, Shape b, Op op) {
  return {broadcast_dim(a.rows, b.rows, op, a, b), broadcast_dim(a.cols, b.cols, op, a, b)};
}

template <class F>
Matrix broadcast_apply(const Matrix& a, const Matrix& b, Shape out, F f) {
  Matrix r(out);
  if (a.shape() == out && b.shape() == out) {
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = f(a[i], b[i]);
    return r;
  }
  const bool ar = a.rows() == 1, ac = a.cols() == 1, br = b.rows() == 1, bc = b.cols() == 1;
  for (std::size_t i = 0; i < out.rows; ++i) {
    for (std::size_t j = 0; j < out.cols; ++j) {
      r(i, j) = f(a(ar ? 0 : i, ac ? 0 : j), b(br ? 0 : i, bc ? 0 : j));
    }
  }
  return r;
}

template <class F>
Matrix map(const Matrix& a, F f) {
  Matrix r(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = f(a[i]);
  return r;
}

double stable_softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Sum a gradient of the broadcast output shape back onto an operand's shape.
Matrix reduce_to(const Matrix& grad, Shape target) {
  if (grad.shape() == target) return grad;
  Matrix r(target);
  const bool tr = target.rows == 1, tc = target.cols == 1;
  for (std::size_t i = 0; i < grad.rows(); ++i)
    for (std::size_t j = 0; j < grad.cols(); ++j) r(tr ? 0 : i, tc ? 0 : j) += grad(i, j);
  return r;
}

void accumulate(Matrix& slot, const Matrix& contribution) {
  if (slot.empty()) {
    slot = contribution;
    return;
  }
  simd::active().axpy(slot.size(), 1.0, contribution.data(), slot.data());
}

Matrix& ensure(Matrix& slot, Shape shape) {
  if (slot.empty()) slot = Matrix(shape);
  return slot;
}

void require_positive_size(const Matrix& a, Op op) {
  if (a.size() == 0) throw ShapeError(fmt::format("{}: empty operand", op_name(op)));
}

}  // namespace

Matrix evaluate(const Node& node, std::span<const Matrix* const> in) {
  const auto& k = simd::active();
  switch (node.op) {
    case Op::leaf:
      return node.value;
    case Op::matmul: {
      const Matrix& a = *in[0];
      const Matrix& b = *in[1];
      if (a.cols() != b.rows()) {
        throw ShapeError(fmt::format("matmul: inner dimensions differ, {} x {}", to_string(a.shape()),
                                     to_string(b.shape())));
      }
      Matrix c(a.rows(), b.cols());
      k.gemm(simd::Trans::no, simd::Trans::no, a.rows(), b.cols(), a.cols(), a.data(), b.data(), c.data(), false);
      return c;
    }
    case Op::add:
      return broadcast_apply(*in[0], *in[1], broadcast_shape(in[0]->shape(), in[1]->shape(), node.op),
                             [](double x, double y) { return x + y; });
    case Op::sub:
      return broadcast_apply(*in[0], *in[1], broadcast_shape(in[0]->shape(), in[1]->shape(), node.op),
                             [](double x, double y) { return x - y; });
    case Op::mul: {
      const Shape out = broadcast_shape(in[0]->shape(), in[1]->shape(), node.op);
      if (in[0]->shape() == out && in[1]->shape() == out) {
        Matrix r(out);
        k.mul(r.size(), in[0]->data(), in[1]->data(), r.data());
        return r;
      }
      return broadcast_apply(*in[0], *in[1], out, [](double x, double y) { return x * y; });
    }
    case Op::scale: {
      const double s = node.attr;
      return map(*in[0], [s](double x) { return s * x; });
    }
    case Op::add_scalar: {
      const double s = node.attr;
      return map(*in[0], [s](double x) { return x + s; });
    }
    case Op::sigmoid: return map(*in[0], stable_sigmoid);
    case Op::tanh: return map(*in[0], [](double x) { return std::tanh(x); });
    case Op::relu: return map(*in[0], [](double x) { return x > 0.0 ? x : 0.0; });
    case Op::softplus: return map(*in[0], stable_softplus);
    case Op::exp: return map(*in[0], [](double x) { return std::exp(x); });
    case Op::log: return map(*in[0], [](double x) { return std::log(x); });
    case Op::square: return map(*in[0], [](double x) { return x * x; });
    case Op::pow: {
      const double p = node.attr;
      return map(*in[0], [p](double x) { return std::pow(x, p); });
    }
    case Op::sum:
    case Op::mean: {
      const Matrix& a = *in[0];
      double acc = 0.0;
      for (double v : a.values()) acc += v;
      if (node.op == Op::mean) {
        require_positive_size(a, node.op);
        acc /= static_cast<double>(a.size());
      }
      return Matrix::scalar(acc);
    }
    case Op::sum_rows:
    case Op::mean_rows:
    case Op::max_rows: {
      const Matrix& a = *in[0];
      require_positive_size(a, node.op);
      Matrix r(1, a.cols(), node.op == Op::max_rows ? -INFINITY : 0.0);
      for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
          if (node.op == Op::max_rows) {
            r(0, j) = std::max(r(0, j), a(i, j));
          } else {
            r(0, j) += a(i, j);
          }
        }
      }
      if (node.op == Op::mean_rows) {
        for (double& v : r.values()) v /= static_cast<double>(a.rows());
      }
      return r;
    }
    case Op::row_sum: {
      const Matrix& a = *in[0];
      Matrix r(a.rows(), 1);
      for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j);
        r(i, 0) = acc;
      }
      return r;
    }
    case Op::softmax: {
      const Matrix& a = *in[0];
      require_positive_size(a, node.op);
      Matrix r(a.shape());
      for (std::size_t j = 0; j < a.cols(); ++j) {
        double hi = -INFINITY;
        for (std::size_t i = 0; i < a.rows(); ++i) hi = std::max(hi, a(i, j));
        double z = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) {
          r(i, j) = std::exp(a(i, j) - hi);
          z += r(i, j);
        }
        for (std::size_t i = 0; i < a.rows(); ++i) r(i, j) /= z;
      }
      return r;
    }
    case Op::concat_cols: {
      const std::size_t rows = in[0]->rows();
      std::size_t cols = 0;
      for (const Matrix* m : in) {
        if (m->rows() != rows) {
          throw ShapeError(fmt::format("concat_cols: row counts differ, {} vs {}", to_string(in[0]->shape()),
                                       to_string(m->shape())));
        }
        cols += m->cols();
      }
      Matrix r(rows, cols);
      std::size_t offset = 0;
      for (const Matrix* m : in) {
        for (std::size_t i = 0; i < rows; ++i)
          for (std::size_t j = 0; j < m->cols(); ++j) r(i, offset + j) = (*m)(i, j);
        offset += m->cols();
      }
      return r;
    }
    case Op::concat_rows: {
      const std::size_t cols = in[0]->cols();
      std::vector<double> values;
      std::size_t rows = 0;
      for (const Matrix* m : in) {
        if (m->cols() != cols) {
          throw ShapeError(fmt::format("concat_rows: column counts differ, {} vs {}", to_string(in[0]->shape()),
                                       to_string(m->shape())));
        }
        values.insert(values.end(), m->values().begin(), m->values().end());
        rows += m->rows();
      }
      return Matrix(rows, cols, std::move(values));
    }
    case Op::slice_cols: {
      const Matrix& a = *in[0];
      if (node.index0 + node.index1 > a.cols()) {
        throw ShapeError(fmt::format("slice_cols: columns [{}, {}) outside {}", node.index0,
                                     node.index0 + node.index1, to_string(a.shape())));
      }
      Matrix r(a.rows(), node.index1);
      for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < node.index1; ++j) r(i, j) = a(i, node.index0 + j);
      return r;
    }
    case Op::element: {
      const Matrix& a = *in[0];
      if (node.index0 >= a.rows() || node.index1 >= a.cols()) {
        throw ShapeError(fmt::format("element: ({}, {}) outside {}", node.index0, node.index1, to_string(a.shape())));
      }
      return Matrix::scalar(a(node.index0, node.index1));
    }
    case Op::transpose:
      return in[0]->transposed();
    case Op::broadcast_to: {
      const Shape out{node.index0, node.index1};
      const Matrix& a = *in[0];
      broadcast_shape(a.shape(), out, node.op);
      if ((a.rows() != 1 && a.rows() != out.rows) || (a.cols() != 1 && a.cols() != out.cols)) {
        throw ShapeError(fmt::format("broadcast_to: cannot expand {} to {}", to_string(a.shape()), to_string(out)));
      }
      return broadcast_apply(a, Matrix(out), out, [](double x, double) { return x; });
    }
  }
  throw Error("evaluate: unknown op");
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::variable(Matrix value) { return constant(std::move(value)); }

Var Tape::parameter(std::size_t param_id, Matrix value) {
  Var v = constant(std::move(value));
  nodes_.back().param_id = param_id;
  return v;
}

Var Tape::record(Op op, std::vector<std::uint32_t> inputs, double attr, std::size_t index0, std::size_t index1) {
  Node n;
  n.op = op;
  n.inputs = std::move(inputs);
  n.attr = attr;
  n.index0 = index0;
  n.index1 = index1;
  std::vector<const Matrix*> in;
  in.reserve(n.inputs.size());
  for (std::uint32_t id : n.inputs) in.push_back(&nodes_[id].value);
  n.value = evaluate(n, in);
  nodes_.push_back(std::move(n));
  return {this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

std::vector<Matrix> Tape::replay() const {
  std::vector<Matrix> values(nodes_.size());
  std::vector<const Matrix*> in;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.op == Op::leaf) {
      values[id] = n.value;
      continue;
    }
    in.clear();
    for (std::uint32_t i : n.inputs) in.push_back(&values[i]);
    values[id] = evaluate(n, in);
  }
  return values;
}

std::vector<Matrix> Tape::adjoints(Var loss) const {
  if (loss.shape() != Shape{1, 1}) {
    throw ShapeError(fmt::format("backward: loss must be [1x1], got {}", to_string(loss.shape())));
  }
  const auto& k = simd::active();
  std::vector<Matrix> adj(nodes_.size());
  adj[loss.id()] = Matrix::scalar(1.0);

  for (std::size_t idx = loss.id() + 1; idx-- > 0;) {
    const Node& n = nodes_[idx];
    if (n.op == Op::leaf || adj[idx].empty()) continue;
    const Matrix& g = adj[idx];
    const Matrix& y = n.value;
    auto input = [&](std::size_t i) -> const Matrix& { return nodes_[n.inputs[i]].value; };
    auto slot = [&](std::size_t i) -> Matrix& { return adj[n.inputs[i]]; };

    switch (n.op) {
      case Op::leaf:
        break;
      case Op::matmul: {
        const Matrix& a = input(0);
        const Matrix& b = input(1);
        Matrix& da = ensure(slot(0), a.shape());
        k.gemm(simd::Trans::no, simd::Trans::yes, a.rows(), a.cols(), b.cols(), g.data(), b.data(), da.data(), true);
        Matrix& db = ensure(slot(1), b.shape());
        k.gemm(simd::Trans::yes, simd::Trans::no, b.rows(), b.cols(), a.rows(), a.data(), g.data(), db.data(), true);
        break;
      }
      case Op::add:
        accumulate(slot(0), reduce_to(g, input(0).shape()));
        accumulate(slot(1), reduce_to(g, input(1).shape()));
        break;
      case Op::sub:
        accumulate(slot(0), reduce_to(g, input(0).shape()));
        accumulate(slot(1), reduce_to(-1.0 * g, input(1).shape()));
        break;
      case Op::mul: {
        const Matrix& a = input(0);
        const Matrix& b = input(1);
        if (a.shape() == g.shape() && b.shape() == g.shape()) {
          k.mul_acc(g.size(), g.data(), b.data(), ensure(slot(0), a.shape()).data());
          k.mul_acc(g.size(), g.data(), a.data(), ensure(slot(1), b.shape()).data());
        } else {
          const Shape out = g.shape();
          accumulate(slot(0), reduce_to(broadcast_apply(g, b, out, [](double x, double z) { return x * z; }), a.shape()));
          accumulate(slot(1), reduce_to(broadcast_apply(g, a, out, [](double x, double z) { return x * z; }), b.shape()));
        }
        break;
      }
      case Op::scale:
        accumulate(slot(0), n.attr * g);
        break;
      case Op::add_scalar:
        accumulate(slot(0), g);
        break;
      case Op::sigmoid:
        accumulate(slot(0), broadcast_apply(g, y, g.shape(), [](double d, double s) { return d * s * (1.0 - s); }));
        break;
      case Op::tanh:
        accumulate(slot(0), broadcast_apply(g, y, g.shape(), [](double d, double t) { return d * (1.0 - t * t); }));
        break;
      case Op::relu:
        accumulate(slot(0), broadcast_apply(g, input(0), g.shape(), [](double d, double x) { return x > 0.0 ? d : 0.0; }));
        break;
      case Op::softplus:
        accumulate(slot(0), broadcast_apply(g, input(0), g.shape(), [](double d, double x) { return d * stable_sigmoid(x); }));
        break;
      case Op::exp:
        accumulate(slot(0), broadcast_apply(g, y, g.shape(), [](double d, double e) { return d * e; }));
        break;
      case Op::log:
        accumulate(slot(0), broadcast_apply(g, input(0), g.shape(), [](double d, double x) { return d / x; }));
        break;
      case Op::square:
        accumulate(slot(0), broadcast_apply(g, input(0), g.shape(), [](double d, double x) { return 2.0 * x * d; }));
        break;
      case Op::pow: {
        const double p = n.attr;
        accumulate(slot(0), broadcast_apply(g, input(0), g.shape(),
                                            [p](double d, double x) { return d * p * std::pow(x, p - 1.0); }));
        break;
      }
      case Op::sum:
      case Op::mean: {
        const Matrix& a = input(0);
        double v = g.item();
        if (n.op == Op::mean) v /= static_cast<double>(a.size());
        accumulate(slot(0), Matrix(a.shape(), v));
        break;
      }
      case Op::sum_rows:
      case Op::mean_rows: {
        const Matrix& a = input(0);
        const double s = n.op == Op::mean_rows ? 1.0 / static_cast<double>(a.rows()) : 1.0;
        Matrix& da = ensure(slot(0), a.shape());
        for (std::size_t i = 0; i < a.rows(); ++i)
          for (std::size_t j = 0; j < a.cols(); ++j) da(i, j) += s * g(0, j);
        break;
      }
      case Op::max_rows: {
        const Matrix& a = input(0);
        Matrix& da = ensure(slot(0), a.shape());
        for (std::size_t j = 0; j < a.cols(); ++j) {
          std::size_t best = 0;
          for (std::size_t i = 1; i < a.rows(); ++i)
            if (a(i, j) > a(best, j)) best = i;
          da(best, j) += g(0, j);
        }
        break;
      }
      case Op::row_sum: {
        const Matrix& a = input(0);
        Matrix& da = ensure(slot(0), a.shape());
        for (std::size_t i = 0; i < a.rows(); ++i)
          for (std::size_t j = 0; j < a.cols(); ++j) da(i, j) += g(i, 0);
        break;
      }
      case Op::softmax: {
        Matrix& da = ensure(slot(0), y.shape());
        for (std::size_t j = 0; j < y.cols(); ++j) {
          double dotp = 0.0;
          for (std::size_t i = 0; i < y.rows(); ++i) dotp += y(i, j) * g(i, j);
          for (std::size_t i = 0; i < y.rows(); ++i) da(i, j) += y(i, j) * (g(i, j) - dotp);
        }
        break;
      }
      case Op::concat_cols: {
        std::size_t offset = 0;
        for (std::size_t p = 0; p < n.inputs.size(); ++p) {
          const Matrix& part = input(p);
          Matrix& dp = ensure(slot(p), part.shape());
          for (std::size_t i = 0; i < part.rows(); ++i)
            for (std::size_t j = 0; j < part.cols(); ++j) dp(i, j) += g(i, offset + j);
          offset += part.cols();
        }
        break;
      }
      case Op::concat_rows: {
        std::size_t offset = 0;
        for (std::size_t p = 0; p < n.inputs.size(); ++p) {
          const Matrix& part = input(p);
          Matrix& dp = ensure(slot(p), part.shape());
          k.axpy(part.size(), 1.0, g.data() + offset, dp.data());
          offset += part.size();
        }
        break;
      }
      case Op::slice_cols: {
        const Matrix& a = input(0);
        Matrix& da = ensure(slot(0), a.shape());
        for (std::size_t i = 0; i < a.rows(); ++i)
          for (std::size_t j = 0; j < n.index1; ++j) da(i, n.index0 + j) += g(i, j);
        break;
      }
      case Op::element: {
        Matrix& da = ensure(slot(0), input(0).shape());
        da(n.index0, n.index1) += g.item();
        break;
      }
      case Op::transpose:
        accumulate(slot(0), g.transposed());
        break;
      case Op::broadcast_to:
        accumulate(slot(0), reduce_to(g, input(0).shape()));
        break;
    }
  }
  return adj;
}

namespace {
Var unary(Op op, Var a, double attr = 0.0) { return a.tape().record(op, {a.id()}, attr); }
Var binary(Op op, Var a, Var b) {
  if (&a.tape() != &b.tape()) throw Error(fmt::format("{}: operands live on different tapes", op_name(op)));
  return a.tape().record(op, {a.id(), b.id()});
}
Var variadic(Op op, std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError(fmt::format("{}: no operands", op_name(op)));
  std::vector<std::uint32_t> ids;
  ids.reserve(parts.size());
  for (const Var& v : parts) ids.push_back(v.id());
  return parts.front().tape().record(op, std::move(ids));
}
}  // namespace

Var matmul(Var a, Var b) { return binary(Op::matmul, a, b); }
Var add(Var a, Var b) { return binary(Op::add, a, b); }
Var sub(Var a, Var b) { return binary(Op::sub, a, b); }
Var mul(Var a, Var b) { return binary(Op::mul, a, b); }
Var scale(Var a, double s) { return unary(Op::scale, a, s); }
Var add_scalar(Var a, double s) { return unary(Op::add_scalar, a, s); }
Var sigmoid(Var a) { return unary(Op::sigmoid, a); }
Var tanh(Var a) { return unary(Op::tanh, a); }
Var relu(Var a) { return unary(Op::relu, a); }
Var softplus(Var a) { return unary(Op::softplus, a); }
Var exp(Var a) { return unary(Op::exp, a); }
Var log(Var a) { return unary(Op::log, a); }
Var square(Var a) { return unary(Op::square, a); }
Var pow(Var a, double p) { return unary(Op::pow, a, p); }
Var sum(Var a) { return unary(Op::sum, a); }
Var mean(Var a) { return unary(Op::mean, a); }
Var sum_rows(Var a) { return unary(Op::sum_rows, a); }
Var mean_rows(Var a) { return unary(Op::mean_rows, a); }
Var max_rows(Var a) { return unary(Op::max_rows, a); }
Var row_sum(Var a) { return unary(Op::row_sum, a); }
Var softmax(Var a) { return unary(Op::softmax, a); }
Var concat_cols(std::span<const Var> parts) { return variadic(Op::concat_cols, parts); }
Var concat_rows(std::span<const Var> parts) { return variadic(Op::concat_rows, parts); }
Var slice_cols(Var a, std::size_t start, std::size_t count) {
  return a.tape().record(Op::slice_cols, {a.id()}, 0.0, start, count);
}
Var element(Var a, std::size_t r, std::size_t c) { return a.tape().record(Op::element, {a.id()}, 0.0, r, c); }
Var transpose(Var a) { return unary(Op::transpose, a); }
Var broadcast_to(Var a, Shape shape) {
  return a.tape().record(Op::broadcast_to, {a.id()}, 0.0, shape.rows, shape.cols);
}

}  // namespace lcgode::ad
