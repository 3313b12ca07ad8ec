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

// Architecture encoder: degree features -> normalized GCN propagation ->
// global pooling into a single graph embedding.

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lcgode/autodiff/params.hpp"
#include "lcgode/autodiff/tape.hpp"
#include "lcgode/graph/architecture_graph.hpp"
#include "lcgode/rng.hpp"

namespace lcgode::graph {

enum class Pooling { mean, max, learnable };

std::string_view to_string(Pooling p);
Pooling parse_pooling(std::string_view text);

struct NodeFeatures {
  Matrix x;                 // N x 2: (in-degree, out-degree) / effective edge count
  bool degenerate = false;  // no effective edges; x is all zero
};

/// Zeroize edges are excluded from both the degree counts and the total.
NodeFeatures node_features(const ArchitectureGraph& graph);

/// D^-1/2 (A + I) D^-1/2 with D the row sums of A + I, where A(i, j) is the
/// weight of the label on edge i -> j (label 0 always weighs 0).
Matrix normalize_adjacency(const ArchitectureGraph& graph, const std::array<double, kNumEdgeLabels>& label_weights);

/// Bound (on-tape) encoder weights.
struct GraphEncoderWeights {
  std::vector<ad::Var> gcn;   // layer l maps width_l -> width_{l+1}
  ad::Var label_weights;      // 1 x 4; entry 0 is never read
  ad::Var score_weight;       // width x 1, learnable pooling only
  ad::Var score_bias;         // 1 x 1, learnable pooling only
  Pooling pooling = Pooling::mean;
};

/// Differentiable normalized adjacency; gradients flow to label_weights.
ad::Var normalize_adjacency(ad::Tape& tape, const ArchitectureGraph& graph, ad::Var label_weights);

/// Z = A_norm X W, followed by relu unless this is the final layer.
ad::Var gcn_layer(ad::Var x, ad::Var a_norm, ad::Var w, bool final_layer);

/// Pool N x width node embeddings into 1 x width. Learnable pooling scores
/// each node with a one-layer GCN (A_norm Z w + b) and takes the softmax-
/// weighted sum of rows.
ad::Var pool(ad::Var z, Pooling method, ad::Var a_norm = {}, ad::Var score_weight = {}, ad::Var score_bias = {});

/// Full encoder; returns a 1 x width embedding.
ad::Var encode_architecture(ad::Tape& tape, const ArchitectureGraph& graph, const GraphEncoderWeights& weights);

/// Node embeddings before pooling (N x width).
ad::Var encode_nodes(ad::Tape& tape, const ArchitectureGraph& graph, const GraphEncoderWeights& weights,
                     ad::Var* a_norm_out = nullptr);

struct GraphEncoderConfig {
  std::size_t input_width = 2;
  std::vector<std::size_t> layer_widths{16, 16};
  Pooling pooling = Pooling::mean;
};

/// Parameter ids of the encoder inside a ParamStore.
struct GraphEncoderLayout {
  std::vector<std::size_t> gcn;
  std::size_t label_weights = 0;
  std::size_t score_weight = 0;
  std::size_t score_bias = 0;
  Pooling pooling = Pooling::mean;

  GraphEncoderWeights bind(std::span<const ad::Var> bound) const;
};

GraphEncoderLayout add_graph_encoder(ad::ParamStore& store, const GraphEncoderConfig& config, Rng& rng);

}  // namespace lcgode::graph
