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

#include "lcgode/ode/latent_ode.hpp"

#include <array>

#include "lcgode/nn/init.hpp"

namespace lcgode::ode {

using ad::Var;

Var ode_func(Var z, Var z_graph, const OdeFuncWeights& w) {
  const std::array<Var, 2> parts{z, z_graph};
  const Var hidden = ad::tanh(ad::matmul(ad::concat_cols(parts), w.w1) + w.b1);
  return ad::matmul(hidden, w.w2) + w.b2;
}

Var decode(Var z, const DecoderWeights& w) {
  Var features = z;
  if (w.hidden) features = ad::tanh(ad::matmul(z, w.w_hidden) + w.b_hidden);
  return ad::matmul(features, w.w_out) + w.b_out;
}

OdeFuncWeights OdeLayout::bind_field(std::span<const Var> b) const { return {b[w1], b[b1], b[w2], b[b2]}; }

DecoderWeights OdeLayout::bind_decoder(std::span<const Var> b) const {
  DecoderWeights d;
  d.hidden = decoder_hidden;
  if (decoder_hidden) {
    d.w_hidden = b[dec_w_hidden];
    d.b_hidden = b[dec_b_hidden];
  }
  d.w_out = b[dec_w_out];
  d.b_out = b[dec_b_out];
  return d;
}

OdeLayout add_latent_ode(ad::ParamStore& store, const OdeConfig& config, Rng& rng) {
  const std::size_t d = config.latent_dim;
  OdeLayout l{};
  l.w1 = store.add("ode.w1", nn::glorot(2 * d, config.hidden_width, rng));
  l.b1 = store.add("ode.b1", Matrix(1, config.hidden_width));
  l.w2 = store.add("ode.w2", nn::glorot(config.hidden_width, d, rng, 0.1));
  l.b2 = store.add("ode.b2", Matrix(1, d));
  l.decoder_hidden = config.decoder_hidden;
  std::size_t in = d;
  if (config.decoder_hidden) {
    l.dec_w_hidden = store.add("dec.w_hidden", nn::glorot(d, config.decoder_width, rng));
    l.dec_b_hidden = store.add("dec.b_hidden", Matrix(1, config.decoder_width));
    in = config.decoder_width;
  }
  l.dec_w_out = store.add("dec.w_out", nn::glorot(in, 1, rng));
  l.dec_b_out = store.add("dec.b_out", Matrix(1, 1));
  return l;
}

}  // namespace lcgode::ode
