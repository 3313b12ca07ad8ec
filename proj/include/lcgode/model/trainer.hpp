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

// Training loop, optimizer, curve scaling and extrapolation.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lcgode/data/curves.hpp"
#include "lcgode/model/lcgode.hpp"

namespace lcgode::model {

class TrainingError : public Error {
 public:
  using Error::Error;
};

struct TrainConfig {
  ModelConfig model;
  data::Metric metric = data::Metric::test_accuracy;
  double learning_rate = 1e-3;
  std::size_t batch_size = 40;
  std::size_t epochs = 400;
  std::size_t condition_length = 10;
  double t_max = 1.0;
  double kl_weight = 1.0;
  double obs_noise = 0.05;
  std::size_t patience = 50;
  double weight_decay = 0.01;
  std::uint64_t seed = 0;

  /// Throws unless every size and rate is positive.
  void validate() const;
};

struct OptimizerState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::size_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static OptimizerState zeros_like(const ad::ParamStore& params);
};

/// Bias-corrected Adam moments followed by decoupled weight decay on the old value.
void adamw_step(ad::ParamStore& params, const ad::Gradients& grads, OptimizerState& state, double lr,
                double weight_decay);

/// Maps raw curve values to the scale the model is trained on.
struct CurveTransform {
  enum class Kind { identity, log_standardize };
  Kind kind = Kind::identity;
  double mean = 0.0;
  double scale = 1.0;

  /// Accuracy: identity. Loss: log then standardize with the mean/std of the given trials.
  static CurveTransform fit(data::Metric metric, std::span<const data::Trial> trials);
  double forward(double raw) const;
  double inverse(double model_value) const;
};

/// Everything needed to extrapolate: weights, training config, scaling and grid length.
struct Predictor {
  LcGode model;
  TrainConfig config;
  CurveTransform transform;
  std::size_t epochs = 0;  // curve length m

  Grid grid() const { return {epochs, config.condition_length, config.t_max}; }
};

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean negative ELBO over finite steps
  double val_mape = 0.0;
  std::size_t skipped_steps = 0;
};

struct TrainResult {
  Predictor predictor;  // best-validation parameters
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double best_val_mape = 0.0;
  bool early_stopped = false;
};

using EpochCallback = std::function<void(const EpochLog&)>;

TrainResult train(std::span<const data::Trial> train_set, std::span<const data::Trial> validation_set,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

struct Extrapolation {
  std::vector<double> mean;  // epochs n+1 .. m, raw scale
  std::vector<double> std;
};

/// K forward passes with independent noise (K = 1 uses zero noise). prefix is the
/// first n raw values of the curve.
Extrapolation extrapolate(const Predictor& predictor, std::span<const double> prefix,
                          const graph::ArchitectureGraph& graph, std::size_t samples, Rng& rng);

/// Extrapolates every trial's curve; trial i draws noise from stream ("predict", i).
/// Results do not depend on the thread count.
std::vector<Extrapolation> extrapolate_all(const Predictor& predictor, std::span<const data::Trial> trials,
                                           std::size_t samples, std::uint64_t seed, std::size_t threads = 1);

/// Posterior-mean predictions for a set of trials in one batched pass.
std::vector<std::vector<double>> predict_mean(const Predictor& predictor, std::span<const data::Trial> trials);

/// Noise-free joint initial state [z_{n+1} || z_G] of each trial (B x 2D),
/// with z_{n+1} the posterior mean. z_G is zero for an ablated model.
Matrix joint_embeddings(const Predictor& predictor, std::span<const data::Trial> trials);

/// Mean MAPE over trials of the raw-scale prediction window.
double validation_mape(const Predictor& predictor, std::span<const data::Trial> trials);

}  // namespace lcgode::model
