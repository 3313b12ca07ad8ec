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

// Synthetic learning curves from closed-form gradient flow on diagonal
// quadratic losses, with an architecture -> eigenvalue link so that the
// network graph genuinely shapes the curve.

#include <functional>
#include <span>
#include <vector>

#include "lcgode/data/curves.hpp"
#include "lcgode/rng.hpp"

namespace lcgode::data {

/// Sampling ranges of the MLP configuration space.
struct HyperparamRanges {
  static constexpr int batch_size_min = 16, batch_size_max = 512;         // log scale
  static constexpr double lr_min = 1e-4, lr_max = 1e-1;                   // log scale
  static constexpr double weight_decay_min = 1e-5, weight_decay_max = 0.1;
  static constexpr int layers_min = 1, layers_max = 5;
  static constexpr int units_min = 16, units_max = 1024;                  // log scale, per layer
  static constexpr double dropout_min = 0.0, dropout_max = 1.0;
};

struct MlpHyperparams {
  int batch_size = 0;
  double learning_rate = 0.0;
  double weight_decay = 0.0;
  int num_layers = 0;
  std::vector<int> units_per_layer;
  double dropout = 0.0;

  nlohmann::json to_json() const;
  static MlpHyperparams from_json(const nlohmann::json& j);
  friend bool operator==(const MlpHyperparams&, const MlpHyperparams&) = default;
};

MlpHyperparams sample_hyperparams(Rng& rng);

struct MlpGraphShape {
  std::size_t input_width = 1;
  std::size_t output_width = 1;
  /// Neurons represented by one graph node (1 = one node per neuron).
  std::size_t neurons_per_node = 1;
};

/// Fully connected layered DAG: inputs -> hidden layers -> outputs, label 1.
graph::ArchitectureGraph hyperparams_to_graph(const MlpHyperparams& hp, const MlpGraphShape& shape = {});

/// L(theta) = 1/2 sum_k lambda_k theta_k^2 under d(theta)/dt = -dL/d(theta).
struct GradientFlowTask {
  std::vector<double> eigenvalues;
  std::vector<double> theta0;
  double noise = 0.0;  // sigma of multiplicative log-normal noise per point

  void validate() const;
  /// L(t) = sum_k 1/2 lambda_k theta0_k^2 exp(-2 lambda_k t)
  double loss_at(double t) const;
  /// |grad L|^2 = sum_k lambda_k^2 theta_k(t)^2, which equals -dL/dt.
  double grad_norm_sq(double t) const;
};

/// Loss curve on t_i = i * t_max / m. rng is required when task.noise > 0.
LearningCurve gradient_flow_curve(const GradientFlowTask& task, std::size_t m, double t_max, Rng* rng = nullptr);

/// Mean entry of the node feature matrix.
double mean_node_feature(const graph::ArchitectureGraph& g);
/// Effective edges per node.
double mean_degree(const graph::ArchitectureGraph& g);

/// Maps a graph to a positive multiplier applied to every eigenvalue.
using RateLink = std::function<double(const graph::ArchitectureGraph&)>;

/// MLP default: decreasing in the mean node feature (larger networks, whose
/// mean feature is smaller, train faster). CNN cells: weighted by the
/// operations on the cell edges.
double default_rate_link(const graph::ArchitectureGraph& g);

struct SyntheticConfig {
  std::size_t num_trials = 550;
  std::size_t epochs = 200;
  double t_max = 1.0;
  double noise = 0.0;
  graph::GraphKind kind = graph::GraphKind::mlp;
  MlpGraphShape graph_shape{4, 2, 64};
  std::uint64_t seed = 0;
  /// accuracy = accuracy_max * (1 - exp(-accuracy_scale / loss))
  double accuracy_max = 0.98;
  double accuracy_scale = 0.2;
  std::size_t threads = 1;
};

double loss_to_accuracy(double loss, const SyntheticConfig& config);

/// Per-trial gradient-flow task built from the configuration and graph.
GradientFlowTask synthetic_task(const nlohmann::json& hyperparams, const graph::ArchitectureGraph& g,
                                const RateLink& link, double noise);

/// Deterministic given config.seed, independent of config.threads. Rejects
/// num_trials < 4.
Dataset generate_synthetic_dataset(const SyntheticConfig& config, const RateLink& link = default_rate_link);

}  // namespace lcgode::data
