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

#include "lcgode/seq/sequence_encoder.hpp"

#include <cmath>
#include <fmt/format.h>

#include "lcgode/autodiff/errors.hpp"
#include "lcgode/nn/init.hpp"

namespace lcgode::seq {

using ad::Var;

void ObservedPrefix::validate() const {
  if (times.empty()) throw Error("encode_observations: empty prefix (nothing observed)");
  if (values.cols() != times.size()) {
    throw ShapeError(fmt::format("observed prefix: {} values per row but {} times", values.cols(), times.size()));
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw Error(fmt::format("observed prefix: times not increasing at index {}", i));
  }
  if (!values.all_finite()) throw Error("observed prefix: non-finite value");
}

Var gru_cell(Var h, Var x, const SeqEncoderWeights& w) {
  using ad::matmul;
  const Var u = ad::sigmoid(matmul(x, w.w_update) + matmul(h, w.u_update) + w.b_update);
  const Var r = ad::sigmoid(matmul(x, w.w_reset) + matmul(h, w.u_reset) + w.b_reset);
  const Var c = ad::tanh(matmul(x, w.w_cand) + matmul(r * h, w.u_cand) + w.b_cand);
  return (1.0 - u) * h + u * c;
}

PosteriorVars encode_observations(ad::Tape& tape, const ObservedPrefix& prefix, const SeqEncoderWeights& w) {
  prefix.validate();
  const std::size_t batch = prefix.values.rows();
  const std::size_t hidden = w.u_update.shape().rows;
  const Var values = tape.constant(prefix.values);
  Var h = tape.constant(Matrix(batch, hidden));
  for (std::size_t i = 0; i < prefix.length(); ++i) {
    const std::array<Var, 2> pair{ad::slice_cols(values, i, 1), tape.constant(Matrix(batch, 1, prefix.times[i]))};
    const Var x = ad::matmul(ad::concat_cols(pair), w.w_in) + w.b_in;
    h = gru_cell(h, x, w);
  }
  PosteriorVars out;
  out.mu = ad::matmul(h, w.w_mu) + w.b_mu;
  out.sigma = ad::softplus(ad::matmul(h, w.w_sigma) + w.b_sigma) + kSigmaFloor;
  return out;
}

Var sample_latent(const PosteriorVars& stats, Var noise) { return stats.mu + stats.sigma * noise; }

SeqEncoderWeights SeqEncoderLayout::bind(std::span<const Var> b) const {
  return {b[w_in],     b[b_in],    b[w_update], b[u_update], b[b_update], b[w_reset],
          b[u_reset],  b[b_reset], b[w_cand],   b[u_cand],   b[b_cand],   b[w_mu],
          b[b_mu],     b[w_sigma], b[b_sigma]};
}

SeqEncoderLayout add_sequence_encoder(ad::ParamStore& store, const SeqEncoderConfig& config, Rng& rng) {
  const std::size_t d = config.latent_dim;
  const std::size_t in = config.input_width;
  SeqEncoderLayout l{};
  l.w_in = store.add("seq.w_in", nn::glorot(2, in, rng));
  l.b_in = store.add("seq.b_in", Matrix(1, in));
  l.w_update = store.add("seq.w_update", nn::glorot(in, d, rng));
  l.u_update = store.add("seq.u_update", nn::glorot(d, d, rng));
  l.b_update = store.add("seq.b_update", Matrix(1, d));
  l.w_reset = store.add("seq.w_reset", nn::glorot(in, d, rng));
  l.u_reset = store.add("seq.u_reset", nn::glorot(d, d, rng));
  l.b_reset = store.add("seq.b_reset", Matrix(1, d));
  l.w_cand = store.add("seq.w_cand", nn::glorot(in, d, rng));
  l.u_cand = store.add("seq.u_cand", nn::glorot(d, d, rng));
  l.b_cand = store.add("seq.b_cand", Matrix(1, d));
  l.w_mu = store.add("seq.w_mu", nn::glorot(d, d, rng));
  l.b_mu = store.add("seq.b_mu", Matrix(1, d));
  l.w_sigma = store.add("seq.w_sigma", nn::glorot(d, d, rng, 0.1));
  l.b_sigma = store.add("seq.b_sigma", Matrix(1, d, -3.0));
  return l;
}

}  // namespace lcgode::seq
