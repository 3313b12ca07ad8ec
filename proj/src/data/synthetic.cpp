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

#include "lcgode/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <random>
#include <thread>

#include "lcgode/graph/graph_encoder.hpp"

namespace lcgode::data {

using graph::ArchitectureGraph;
using graph::GraphKind;

nlohmann::json MlpHyperparams::to_json() const {
  return {{"batch_size", batch_size},   {"learning_rate", learning_rate},     {"weight_decay", weight_decay},
          {"num_layers", num_layers},   {"units_per_layer", units_per_layer}, {"dropout", dropout}};
}

MlpHyperparams MlpHyperparams::from_json(const nlohmann::json& j) {
  MlpHyperparams hp;
  hp.batch_size = j.at("batch_size").get<int>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.weight_decay = j.at("weight_decay").get<double>();
  hp.num_layers = j.at("num_layers").get<int>();
  hp.units_per_layer = j.at("units_per_layer").get<std::vector<int>>();
  hp.dropout = j.at("dropout").get<double>();
  if (hp.units_per_layer.size() != static_cast<std::size_t>(hp.num_layers)) {
    throw DataError(fmt::format("hyperparams: num_layers {} but {} layer widths", hp.num_layers,
                                hp.units_per_layer.size()));
  }
  return hp;
}

namespace {

double log_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

int rounded_log_uniform(Rng& rng, int lo, int hi) {
  const auto v = static_cast<int>(std::lround(log_uniform(rng, lo, hi)));
  return std::clamp(v, lo, hi);
}

/// Position of v on [lo, hi] in log space, clamped to [0, 1].
double log_position(double v, double lo, double hi) {
  return std::clamp((std::log(v) - std::log(lo)) / (std::log(hi) - std::log(lo)), 0.0, 1.0);
}

}  // namespace

MlpHyperparams sample_hyperparams(Rng& rng) {
  using R = HyperparamRanges;
  MlpHyperparams hp;
  hp.batch_size = rounded_log_uniform(rng, R::batch_size_min, R::batch_size_max);
  hp.learning_rate = log_uniform(rng, R::lr_min, R::lr_max);
  hp.weight_decay = std::uniform_real_distribution<double>(R::weight_decay_min, R::weight_decay_max)(rng);
  hp.num_layers = std::uniform_int_distribution<int>(R::layers_min, R::layers_max)(rng);
  for (int l = 0; l < hp.num_layers; ++l) hp.units_per_layer.push_back(rounded_log_uniform(rng, R::units_min, R::units_max));
  hp.dropout = std::uniform_real_distribution<double>(R::dropout_min, R::dropout_max)(rng);
  return hp;
}

ArchitectureGraph hyperparams_to_graph(const MlpHyperparams& hp, const MlpGraphShape& shape) {
  if (shape.input_width == 0 || shape.output_width == 0 || shape.neurons_per_node == 0) {
    throw DataError("hyperparams_to_graph: widths and neurons_per_node must be positive");
  }
  std::vector<std::size_t> widths{shape.input_width};
  for (int units : hp.units_per_layer) {
    const double scaled = static_cast<double>(units) / static_cast<double>(shape.neurons_per_node);
    widths.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(scaled))));
  }
  widths.push_back(shape.output_width);

  ArchitectureGraph g{0, {}, GraphKind::mlp};
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t next = offset + widths[l];
    for (std::size_t i = 0; i < widths[l]; ++i)
      for (std::size_t j = 0; j < widths[l + 1]; ++j) g.edges.push_back({offset + i, next + j, 1});
    offset = next;
  }
  g.num_nodes = offset + widths.back();
  return g;
}

void GradientFlowTask::validate() const {
  if (eigenvalues.empty() || eigenvalues.size() != theta0.size()) {
    throw DataError("gradient flow task: eigenvalues and theta0 must be non-empty and equally sized");
  }
  for (double l : eigenvalues) {
    if (!(l > 0.0)) throw DataError(fmt::format("gradient flow task: eigenvalue {} is not positive", l));
  }
  if (!(noise >= 0.0)) throw DataError("gradient flow task: negative noise scale");
}

double GradientFlowTask::loss_at(double t) const {
  double l = 0.0;
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    l += 0.5 * eigenvalues[k] * theta0[k] * theta0[k] * std::exp(-2.0 * eigenvalues[k] * t);
  }
  return l;
}

double GradientFlowTask::grad_norm_sq(double t) const {
  double g = 0.0;
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    const double theta = theta0[k] * std::exp(-eigenvalues[k] * t);
    g += eigenvalues[k] * eigenvalues[k] * theta * theta;
  }
  return g;
}

LearningCurve gradient_flow_curve(const GradientFlowTask& task, std::size_t m, double t_max, Rng* rng) {
  task.validate();
  if (m == 0) throw DataError("gradient_flow_curve: m must be positive");
  if (task.noise > 0.0 && rng == nullptr) throw DataError("gradient_flow_curve: noise requires an rng");
  LearningCurve curve{Metric::test_loss, {}, t_max};
  curve.values.reserve(m);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double t : time_grid(m, t_max)) {
    double v = task.loss_at(t);
    if (task.noise > 0.0) v *= std::exp(task.noise * normal(*rng));
    curve.values.push_back(v);
  }
  return curve;
}

double mean_node_feature(const ArchitectureGraph& g) {
  const Matrix x = graph::node_features(g).x;
  double s = 0.0;
  for (double v : x.values()) s += v;
  return s / static_cast<double>(x.size());
}

double mean_degree(const ArchitectureGraph& g) {
  return static_cast<double>(g.effective_edge_count()) / static_cast<double>(g.num_nodes);
}

double default_rate_link(const ArchitectureGraph& g) {
  if (g.kind == GraphKind::cnn_cell) {
    double score = 0.0;
    for (const auto& e : g.edges) {
      if (e.label == graph::conv3x3) score += 2.0;
      if (e.label == graph::conv1x1) score += 1.0;
      if (e.label == graph::avg_pool3x3) score += 0.5;
    }
    return 0.5 + score / 6.0;
  }
  // Mean node feature is 1/N for any graph with edges; map log(1/N) on
  // [1/100, 1/6] linearly onto multipliers [2.5, 0.5].
  const double s = mean_node_feature(g);
  if (s <= 0.0) return 0.5;
  constexpr double s_hi = 1.0 / 6.0, s_lo = 1.0 / 100.0;
  const double pos = std::clamp(std::log(s_hi / s) / std::log(s_hi / s_lo), 0.0, 1.0);
  return 0.5 + 2.0 * pos;
}

double loss_to_accuracy(double loss, const SyntheticConfig& config) {
  return config.accuracy_max * (1.0 - std::exp(-config.accuracy_scale / loss));
}

GradientFlowTask synthetic_task(const nlohmann::json& hp, const ArchitectureGraph& g, const RateLink& link,
                                double noise) {
  using R = HyperparamRanges;
  const double rate = link(g);
  const double q_lr = log_position(hp.value("learning_rate", 0.01), R::lr_min, R::lr_max);
  const double q_bs = log_position(hp.value("batch_size", 90.0), R::batch_size_min, R::batch_size_max);
  // Fast mode: speed set by the learning rate, height by the batch size.
  // Slow mode: fixed shape, its pace set entirely by the architecture.
  const std::array<double, 2> beta{2.0 + 6.0 * q_lr, 0.6};
  const std::array<double, 2> amplitude{0.8 + 1.0 * q_bs, 0.25};
  GradientFlowTask task;
  task.noise = noise;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    const double lambda = rate * beta[k];
    task.eigenvalues.push_back(lambda);
    task.theta0.push_back(std::sqrt(2.0 * amplitude[k] / lambda));
  }
  return task;
}

namespace {

ArchitectureGraph random_cnn_cell(Rng& rng) {
  ArchitectureGraph g{4, {}, GraphKind::cnn_cell};
  std::uniform_int_distribution<int> label(0, graph::kNumEdgeLabels - 1);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) g.edges.push_back({i, j, label(rng)});
  return g;
}

Trial make_trial(const SyntheticConfig& config, const RateLink& link, std::size_t index) {
  Rng rng = make_rng(config.seed, "trial", index);
  Trial trial;
  trial.trial_id = fmt::format("trial-{:05d}", index);
  if (config.kind == GraphKind::mlp) {
    const MlpHyperparams hp = sample_hyperparams(rng);
    trial.hyperparams = hp.to_json();
    trial.graph = hyperparams_to_graph(hp, config.graph_shape);
  } else {
    trial.hyperparams = {{"batch_size", 256}, {"learning_rate", 0.1}, {"weight_decay", 5e-4}};
    trial.graph = random_cnn_cell(rng);
  }
  const GradientFlowTask task = synthetic_task(trial.hyperparams, trial.graph, link, config.noise);
  LearningCurve loss = gradient_flow_curve(task, config.epochs, config.t_max, &rng);
  LearningCurve acc{Metric::test_accuracy, {}, config.t_max};
  acc.values.reserve(loss.values.size());
  for (double l : loss.values) acc.values.push_back(loss_to_accuracy(l, config));
  trial.curves.emplace(Metric::test_loss, std::move(loss));
  trial.curves.emplace(Metric::test_accuracy, std::move(acc));
  return trial;
}

}  // namespace

Dataset generate_synthetic_dataset(const SyntheticConfig& config, const RateLink& link) {
  if (config.num_trials < 4) {
    throw DataError(fmt::format("generate: {} trials is below the minimum of 4 needed for a split", config.num_trials));
  }
  if (config.epochs < 2) throw DataError("generate: need at least 2 epochs");
  Dataset trials(config.num_trials);
  const std::size_t workers = std::clamp<std::size_t>(config.threads, 1, config.num_trials);
  if (workers == 1) {
    for (std::size_t i = 0; i < trials.size(); ++i) trials[i] = make_trial(config, link, i);
    return trials;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < trials.size(); i += workers) trials[i] = make_trial(config, link, i);
    });
  }
  for (auto& t : pool) t.join();
  return trials;
}

}  // namespace lcgode::data
