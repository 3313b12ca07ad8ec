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

// Full model: prefix encoder -> reparameterized latent sample -> architecture
// encoder -> RK4 latent ODE -> decoder, plus the ELBO objective.

#include <cstdint>
#include <span>
#include <vector>

#include "lcgode/autodiff/params.hpp"
#include "lcgode/graph/graph_encoder.hpp"
#include "lcgode/ode/latent_ode.hpp"
#include "lcgode/seq/sequence_encoder.hpp"

namespace lcgode::model {

struct ModelConfig {
  std::size_t latent_dim = 16;
  std::size_t gcn_layers = 2;
  graph::Pooling pooling = graph::Pooling::mean;
  bool decoder_hidden = false;
  /// NODE ablation: the graph embedding is replaced by zeros.
  bool ablate_graph = false;
  std::size_t ode_substeps = 1;
};

/// Uniform epoch grid t_i = i * t_max / m with the first n epochs observed.
struct Grid {
  std::size_t m = 0;
  std::size_t n = 0;
  double t_max = 1.0;

  std::vector<double> times() const;
  std::vector<double> observed_times() const;
  /// t_{n+1} .. t_m
  std::vector<double> prediction_times() const;
  std::size_t horizon() const { return m - n; }
  /// Throws unless 1 <= n < m and t_max > 0.
  void validate() const;
};

class LcGode {
 public:
  struct Bound {
    seq::SeqEncoderWeights seq;
    graph::GraphEncoderWeights graph;
    ode::OdeFuncWeights field;
    ode::DecoderWeights decoder;
  };

  static LcGode create(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  ad::ParamStore& params() { return params_; }
  const ad::ParamStore& params() const { return params_; }
  Bound bind(std::span<const ad::Var> bound) const;

 private:
  ModelConfig config_;
  ad::ParamStore params_;
  seq::SeqEncoderLayout seq_{};
  graph::GraphEncoderLayout graph_;
  ode::OdeLayout ode_{};
};

struct ForwardResult {
  ad::Var predictions;  // B x (m - n), decoded states at t_{n+1} .. t_m
  seq::PosteriorVars posterior;
  ad::Var z_graph;      // B x D
  ad::Var z_initial;    // B x D sample at t_{n+1}
};

/// Batched forward pass. prefix is B x n on the model scale, graphs has B
/// entries and noise is B x D standard-normal draws.
ForwardResult forward(ad::Tape& tape, const LcGode::Bound& weights, const ModelConfig& config, const Matrix& prefix,
                      std::span<const graph::ArchitectureGraph* const> graphs, const Grid& grid, const Matrix& noise);

struct ElboConfig {
  double obs_noise = 0.05;
  double kl_weight = 1.0;
};

/// Batch-mean ELBO: sum_i log N(y_i | yhat_i, obs_noise^2) - kl_weight * KL(q || N(0, I)).
ad::Var elbo(ad::Var predictions, const Matrix& targets, const seq::PosteriorVars& posterior, const ElboConfig& config);

/// Closed-form KL(N(mu, diag sigma^2) || N(0, I)) summed over all entries.
double kl_standard_normal(std::span<const double> mu, std::span<const double> sigma);

}  // namespace lcgode::model
