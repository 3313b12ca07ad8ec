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

#include "lcgode/model/lcgode.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace lcgode::model {

using ad::Var;

std::vector<double> Grid::times() const {
  std::vector<double> t(m);
  for (std::size_t i = 0; i < m; ++i) t[i] = static_cast<double>(i + 1) * t_max / static_cast<double>(m);
  return t;
}

std::vector<double> Grid::observed_times() const {
  const auto t = times();
  return {t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<double> Grid::prediction_times() const {
  const auto t = times();
  return {t.begin() + static_cast<std::ptrdiff_t>(n), t.end()};
}

void Grid::validate() const {
  if (n == 0 || n >= m) throw Error(fmt::format("grid: need 1 <= condition length ({}) < epochs ({})", n, m));
  if (!(t_max > 0.0)) throw Error(fmt::format("grid: t_max {} is not positive", t_max));
}

LcGode LcGode::create(const ModelConfig& config, std::uint64_t seed) {
  if (config.latent_dim == 0) throw Error("model: latent dimension must be positive");
  if (config.gcn_layers == 0) throw Error("model: need at least one GCN layer");
  LcGode model;
  model.config_ = config;
  const std::size_t d = config.latent_dim;
  Rng rng = make_rng(seed, "init");
  model.seq_ = seq::add_sequence_encoder(model.params_, {d, d}, rng);
  graph::GraphEncoderConfig gcfg;
  gcfg.layer_widths.assign(config.gcn_layers, d);
  gcfg.pooling = config.pooling;
  model.graph_ = graph::add_graph_encoder(model.params_, gcfg, rng);
  model.ode_ = ode::add_latent_ode(model.params_, {d, d, config.decoder_hidden, d}, rng);
  return model;
}

LcGode::Bound LcGode::bind(std::span<const Var> bound) const {
  return {seq_.bind(bound), graph_.bind(bound), ode_.bind_field(bound), ode_.bind_decoder(bound)};
}

ForwardResult forward(ad::Tape& tape, const LcGode::Bound& w, const ModelConfig& config, const Matrix& prefix,
                      std::span<const graph::ArchitectureGraph* const> graphs, const Grid& grid, const Matrix& noise) {
  grid.validate();
  const std::size_t batch = prefix.rows();
  const std::size_t d = config.latent_dim;
  if (prefix.cols() != grid.n) {
    throw ShapeError(fmt::format("forward: prefix has {} epochs but the grid observes {}", prefix.cols(), grid.n));
  }
  if (graphs.size() != batch) throw ShapeError(fmt::format("forward: {} graphs for {} curves", graphs.size(), batch));
  if (noise.shape() != Shape{batch, d}) {
    throw ShapeError(fmt::format("forward: noise {} but expected {}", to_string(noise.shape()), to_string(Shape{batch, d})));
  }

  ForwardResult out;
  out.posterior = seq::encode_observations(tape, {prefix, grid.observed_times()}, w.seq);
  out.z_initial = seq::sample_latent(out.posterior, tape.constant(noise));

  if (config.ablate_graph) {
    out.z_graph = tape.constant(Matrix(batch, d));
  } else {
    std::vector<Var> rows;
    rows.reserve(batch);
    for (const auto* g : graphs) rows.push_back(graph::encode_architecture(tape, *g, w.graph));
    out.z_graph = ad::concat_rows(rows);
  }

  const Var z_graph = out.z_graph;
  auto field = [&](const Var& z) { return ode::ode_func(z, z_graph, w.field); };
  const std::vector<double> times = grid.prediction_times();
  const std::vector<Var> trajectory = ode::integrate(field, out.z_initial, std::span<const double>(times), config.ode_substeps);

  std::vector<Var> decoded;
  decoded.reserve(trajectory.size());
  for (const Var& z : trajectory) decoded.push_back(ode::decode(z, w.decoder));
  out.predictions = ad::concat_cols(decoded);
  return out;
}

Var elbo(Var predictions, const Matrix& targets, const seq::PosteriorVars& posterior, const ElboConfig& config) {
  if (predictions.shape() != targets.shape()) {
    throw ShapeError(fmt::format("elbo: predictions {} vs targets {}", to_string(predictions.shape()),
                                 to_string(targets.shape())));
  }
  if (!(config.obs_noise > 0.0)) throw Error("elbo: observation noise must be positive");
  ad::Tape& tape = predictions.tape();
  const double batch = static_cast<double>(targets.rows());
  const double count = static_cast<double>(targets.size());
  const double log_norm = std::log(config.obs_noise * std::sqrt(2.0 * std::numbers::pi));

  const Var sq = ad::sum(ad::square(predictions - tape.constant(targets)));
  const Var loglik = sq * (-0.5 / (config.obs_noise * config.obs_noise)) + (-count * log_norm);
  const Var& mu = posterior.mu;
  const Var& sigma = posterior.sigma;
  const Var kl = 0.5 * ad::sum(ad::square(mu) + ad::square(sigma) - 2.0 * ad::log(sigma) + (-1.0));
  return (loglik - config.kl_weight * kl) * (1.0 / batch);
}

double kl_standard_normal(std::span<const double> mu, std::span<const double> sigma) {
  if (mu.size() != sigma.size()) throw ShapeError("kl_standard_normal: mu and sigma sizes differ");
  double kl = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    kl += 0.5 * (mu[j] * mu[j] + sigma[j] * sigma[j] - 1.0 - 2.0 * std::log(sigma[j]));
  }
  return kl;
}

}  // namespace lcgode::model
