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

#include "lcgode/graph/graph_encoder.hpp"

#include <cmath>
#include <fmt/format.h>

#include "lcgode/nn/init.hpp"

namespace lcgode::graph {

using ad::Var;

std::string_view to_string(Pooling p) {
  switch (p) {
    case Pooling::mean: return "mean";
    case Pooling::max: return "max";
    case Pooling::learnable: return "learnable";
  }
  return "?";
}

Pooling parse_pooling(std::string_view text) {
  if (text == "mean") return Pooling::mean;
  if (text == "max") return Pooling::max;
  if (text == "learnable") return Pooling::learnable;
  throw GraphError(fmt::format("unknown pooling '{}' (expected mean, max or learnable)", text));
}

NodeFeatures node_features(const ArchitectureGraph& graph) {
  graph.validate();
  NodeFeatures f{Matrix(graph.num_nodes, 2), false};
  const std::size_t total = graph.effective_edge_count();
  if (total == 0) {
    f.degenerate = true;
    return f;
  }
  for (const Edge& e : graph.edges) {
    if (e.label == zeroize) continue;
    f.x(e.dst, 0) += 1.0;
    f.x(e.src, 1) += 1.0;
  }
  const double inv = 1.0 / static_cast<double>(total);
  for (double& v : f.x.values()) v *= inv;
  return f;
}

Matrix normalize_adjacency(const ArchitectureGraph& graph, const std::array<double, kNumEdgeLabels>& label_weights) {
  graph.validate();
  const std::size_t n = graph.num_nodes;
  Matrix a = Matrix::identity(n);
  for (const Edge& e : graph.edges) {
    if (e.label != zeroize) a(e.src, e.dst) += label_weights[static_cast<std::size_t>(e.label)];
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a(i, j);
    d[i] = std::pow(s, -0.5);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) *= d[i] * d[j];
  return a;
}

Var normalize_adjacency(ad::Tape& tape, const ArchitectureGraph& graph, Var label_weights) {
  graph.validate();
  const std::size_t n = graph.num_nodes;
  std::array<Matrix, kNumEdgeLabels> masks;
  std::array<bool, kNumEdgeLabels> present{};
  for (const Edge& e : graph.edges) {
    if (e.label == zeroize) continue;
    auto l = static_cast<std::size_t>(e.label);
    if (!present[l]) masks[l] = Matrix(n, n);
    present[l] = true;
    masks[l](e.src, e.dst) = 1.0;
  }
  Var a_tilde = tape.constant(Matrix::identity(n));
  bool any = false;
  for (std::size_t l = 1; l < kNumEdgeLabels; ++l) {
    if (!present[l]) continue;
    any = true;
    a_tilde = a_tilde + tape.constant(std::move(masks[l])) * ad::element(label_weights, 0, l);
  }
  if (!any) return a_tilde;
  const Var d_inv_sqrt = ad::pow(ad::row_sum(a_tilde), -0.5);
  return (a_tilde * d_inv_sqrt) * ad::transpose(d_inv_sqrt);
}

Var gcn_layer(Var x, Var a_norm, Var w, bool final_layer) {
  if (a_norm.shape().rows != a_norm.shape().cols || a_norm.shape().cols != x.shape().rows) {
    throw ShapeError(fmt::format("gcn_layer: adjacency {} does not match features {}", to_string(a_norm.shape()),
                                 to_string(x.shape())));
  }
  Var z = ad::matmul(a_norm, ad::matmul(x, w));
  return final_layer ? z : ad::relu(z);
}

Var pool(Var z, Pooling method, Var a_norm, Var score_weight, Var score_bias) {
  if (z.shape().rows == 0) throw ShapeError("pool: graph has no nodes");
  switch (method) {
    case Pooling::mean: return ad::mean_rows(z);
    case Pooling::max: return ad::max_rows(z);
    case Pooling::learnable: {
      Var propagated = a_norm.valid() ? ad::matmul(a_norm, z) : z;
      Var scores = ad::matmul(propagated, score_weight) + score_bias;
      return ad::matmul(ad::transpose(ad::softmax(scores)), z);
    }
  }
  throw GraphError("pool: unknown method");
}

Var encode_nodes(ad::Tape& tape, const ArchitectureGraph& graph, const GraphEncoderWeights& weights, Var* a_norm_out) {
  if (weights.gcn.empty()) throw GraphError("graph encoder needs at least one GCN layer");
  const NodeFeatures features = node_features(graph);
  const Var a_norm = normalize_adjacency(tape, graph, weights.label_weights);
  Var z = tape.constant(features.x);
  for (std::size_t l = 0; l < weights.gcn.size(); ++l) {
    z = gcn_layer(z, a_norm, weights.gcn[l], l + 1 == weights.gcn.size());
  }
  if (a_norm_out != nullptr) *a_norm_out = a_norm;
  return z;
}

Var encode_architecture(ad::Tape& tape, const ArchitectureGraph& graph, const GraphEncoderWeights& weights) {
  Var a_norm;
  const Var z = encode_nodes(tape, graph, weights, &a_norm);
  return pool(z, weights.pooling, a_norm, weights.score_weight, weights.score_bias);
}

GraphEncoderWeights GraphEncoderLayout::bind(std::span<const Var> bound) const {
  GraphEncoderWeights w;
  for (std::size_t id : gcn) w.gcn.push_back(bound[id]);
  w.label_weights = bound[label_weights];
  w.score_weight = bound[score_weight];
  w.score_bias = bound[score_bias];
  w.pooling = pooling;
  return w;
}

GraphEncoderLayout add_graph_encoder(ad::ParamStore& store, const GraphEncoderConfig& config, Rng& rng) {
  if (config.layer_widths.empty()) throw GraphError("graph encoder needs at least one GCN layer");
  GraphEncoderLayout layout;
  layout.pooling = config.pooling;
  std::size_t in = config.input_width;
  for (std::size_t l = 0; l < config.layer_widths.size(); ++l) {
    const std::size_t out = config.layer_widths[l];
    layout.gcn.push_back(store.add(fmt::format("graph.gcn{}", l), nn::glorot(in, out, rng)));
    in = out;
  }
  layout.label_weights = store.add("graph.label_weights", Matrix::row_vector(std::array{0.0, 1.0, 1.0, 1.0}));
  layout.score_weight = store.add("graph.score_weight", Matrix(in, 1));
  layout.score_bias = store.add("graph.score_bias", Matrix(1, 1));
  return layout;
}

}  // namespace lcgode::graph
