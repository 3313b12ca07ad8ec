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

// GRU encoder over the observed prefix of a learning curve. Produces the
// Gaussian posterior over the latent state at the first unobserved epoch.

#include <span>
#include <vector>

#include "lcgode/autodiff/params.hpp"
#include "lcgode/autodiff/tape.hpp"
#include "lcgode/rng.hpp"

namespace lcgode::seq {

/// Lower bound added to softplus(.) so posterior scales stay positive.
inline constexpr double kSigmaFloor = 1e-4;

/// Observed prefix for a batch of curves sharing one time grid.
struct ObservedPrefix {
  Matrix values;              // B x n
  std::vector<double> times;  // n, strictly increasing

  std::size_t length() const { return times.size(); }
  /// Throws on n = 0, shape mismatch, non-increasing times or non-finite values.
  void validate() const;
};

struct SeqEncoderWeights {
  ad::Var w_in, b_in;                 // (y, t) -> input vector
  ad::Var w_update, u_update, b_update;
  ad::Var w_reset, u_reset, b_reset;
  ad::Var w_cand, u_cand, b_cand;
  ad::Var w_mu, b_mu;
  ad::Var w_sigma, b_sigma;
};

struct PosteriorVars {
  ad::Var mu;     // B x D
  ad::Var sigma;  // B x D, strictly positive
};

/// Plain-value posterior statistics.
struct PosteriorStats {
  Matrix mu;
  Matrix sigma;
};

/// u = sigmoid(x Wu + h Uu + bu), r = sigmoid(x Wr + h Ur + br),
/// c = tanh(x Wc + (r * h) Uc + bc), h' = (1 - u) * h + u * c.
ad::Var gru_cell(ad::Var h, ad::Var x, const SeqEncoderWeights& w);

/// Runs the GRU forward in time from h = 0 and maps the final state to
/// (mu, softplus(.) + kSigmaFloor).
PosteriorVars encode_observations(ad::Tape& tape, const ObservedPrefix& prefix, const SeqEncoderWeights& w);

/// z = mu + sigma * noise.
ad::Var sample_latent(const PosteriorVars& stats, ad::Var noise);

struct SeqEncoderConfig {
  std::size_t latent_dim = 16;
  std::size_t input_width = 16;
};

struct SeqEncoderLayout {
  std::size_t w_in, b_in;
  std::size_t w_update, u_update, b_update;
  std::size_t w_reset, u_reset, b_reset;
  std::size_t w_cand, u_cand, b_cand;
  std::size_t w_mu, b_mu;
  std::size_t w_sigma, b_sigma;

  SeqEncoderWeights bind(std::span<const ad::Var> bound) const;
};

SeqEncoderLayout add_sequence_encoder(ad::ParamStore& store, const SeqEncoderConfig& config, Rng& rng);

}  // namespace lcgode::seq
