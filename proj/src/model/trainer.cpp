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

#include "lcgode/model/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>
#include <thread>

#include "lcgode/eval/metrics.hpp"
#include "lcgode/simd/kernels.hpp"

namespace lcgode::model {

namespace {

constexpr std::size_t kMaxBadEpochs = 3;

std::size_t curve_length(std::span<const data::Trial> trials, data::Metric metric) {
  std::size_t m = 0;
  for (const auto& t : trials) {
    const std::size_t len = t.curve(metric).m();
    if (m == 0) m = len;
    if (len != m) {
      throw TrainingError(fmt::format("trial {} has {} epochs but earlier trials have {}", t.trial_id, len, m));
    }
  }
  return m;
}

struct PreparedBatch {
  Matrix prefix;
  Matrix targets;
  std::vector<const graph::ArchitectureGraph*> graphs;
};

PreparedBatch prepare(std::span<const data::Trial> trials, std::span<const std::size_t> index, const Predictor& p) {
  const Grid grid = p.grid();
  PreparedBatch b{Matrix(index.size(), grid.n), Matrix(index.size(), grid.horizon()), {}};
  b.graphs.reserve(index.size());
  for (std::size_t r = 0; r < index.size(); ++r) {
    const auto& trial = trials[index[r]];
    const auto& values = trial.curve(p.config.metric).values;
    for (std::size_t i = 0; i < grid.m; ++i) {
      const double v = p.transform.forward(values[i]);
      if (i < grid.n) {
        b.prefix(r, i) = v;
      } else {
        b.targets(r, i - grid.n) = v;
      }
    }
    b.graphs.push_back(&trial.graph);
  }
  return b;
}

Matrix standard_normal(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix out(rows, cols);
  for (auto& v : out.values()) v = dist(rng);
  return out;
}

/// Raw-scale predictions of one forward pass, one row per batch entry.
Matrix run_forward(const Predictor& p, const Matrix& prefix, std::span<const graph::ArchitectureGraph* const> graphs,
                   const Matrix& noise) {
  ad::Tape tape;
  const auto bound = p.model.params().bind(tape);
  const auto weights = p.model.bind(bound);
  const ForwardResult fr = forward(tape, weights, p.model.config(), prefix, graphs, p.grid(), noise);
  Matrix out = fr.predictions.value();
  for (auto& v : out.values()) v = p.transform.inverse(v);
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (model.latent_dim == 0) throw TrainingError("latent dimension must be positive");
  if (!(learning_rate > 0.0)) throw TrainingError("learning rate must be positive");
  if (batch_size == 0) throw TrainingError("batch size must be positive");
  if (epochs == 0) throw TrainingError("epoch count must be positive");
  if (condition_length == 0) throw TrainingError("condition length must be positive");
  if (!(t_max > 0.0)) throw TrainingError("t_max must be positive");
  if (!(kl_weight >= 0.0)) throw TrainingError("kl weight must be non-negative");
  if (!(obs_noise > 0.0)) throw TrainingError("observation noise must be positive");
  if (patience == 0) throw TrainingError("patience must be positive");
  if (!(weight_decay >= 0.0)) throw TrainingError("weight decay must be non-negative");
}

OptimizerState OptimizerState::zeros_like(const ad::ParamStore& params) {
  OptimizerState s;
  for (const Matrix& p : params.values()) {
    s.m.emplace_back(p.shape());
    s.v.emplace_back(p.shape());
  }
  return s;
}

void adamw_step(ad::ParamStore& params, const ad::Gradients& grads, OptimizerState& state, double lr,
                double weight_decay) {
  if (grads.by_param.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError("adamw_step: parameter, gradient and moment counts differ");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const simd::AdamWCoefficients k{lr,
                                  state.beta1,
                                  state.beta2,
                                  state.eps,
                                  weight_decay,
                                  1.0 - std::pow(state.beta1, t),
                                  1.0 - std::pow(state.beta2, t)};
  const auto& kernels = simd::active();
  for (std::size_t id = 0; id < params.size(); ++id) {
    Matrix& p = params.value(id);
    const Matrix& g = grads[id];
    if (g.shape() != p.shape() || state.m[id].shape() != p.shape() || state.v[id].shape() != p.shape()) {
      throw ShapeError(fmt::format("adamw_step: shape mismatch for {}", params.name(id)));
    }
    kernels.adamw(p.size(), k, g.data(), p.data(), state.m[id].data(), state.v[id].data());
  }
}

CurveTransform CurveTransform::fit(data::Metric metric, std::span<const data::Trial> trials) {
  CurveTransform t;
  if (metric == data::Metric::test_accuracy) return t;
  t.kind = Kind::log_standardize;
  double sum = 0.0, sum_sq = 0.0;
  std::size_t count = 0;
  for (const auto& trial : trials) {
    for (double v : trial.curve(metric).values) {
      const double l = std::log(v);
      sum += l;
      sum_sq += l * l;
      ++count;
    }
  }
  if (count == 0) throw TrainingError("cannot fit curve scaling on an empty set");
  t.mean = sum / static_cast<double>(count);
  const double var = sum_sq / static_cast<double>(count) - t.mean * t.mean;
  t.scale = var > 1e-24 ? std::sqrt(var) : 1.0;
  return t;
}

double CurveTransform::forward(double raw) const {
  return kind == Kind::identity ? raw : (std::log(raw) - mean) / scale;
}

double CurveTransform::inverse(double model_value) const {
  return kind == Kind::identity ? model_value : std::exp(model_value * scale + mean);
}

std::vector<std::vector<double>> predict_mean(const Predictor& predictor, std::span<const data::Trial> trials) {
  std::vector<std::size_t> index(trials.size());
  std::iota(index.begin(), index.end(), 0);
  const PreparedBatch b = prepare(trials, index, predictor);
  const Matrix noise(trials.size(), predictor.model.config().latent_dim);
  const Matrix raw = run_forward(predictor, b.prefix, b.graphs, noise);
  std::vector<std::vector<double>> out(trials.size());
  for (std::size_t r = 0; r < trials.size(); ++r) out[r] = raw.row(r);
  return out;
}

Matrix joint_embeddings(const Predictor& predictor, std::span<const data::Trial> trials) {
  std::vector<std::size_t> index(trials.size());
  std::iota(index.begin(), index.end(), 0);
  const PreparedBatch b = prepare(trials, index, predictor);
  const Matrix noise(trials.size(), predictor.model.config().latent_dim);
  ad::Tape tape;
  const auto bound = predictor.model.params().bind(tape);
  const ForwardResult fr =
      forward(tape, predictor.model.bind(bound), predictor.model.config(), b.prefix, b.graphs, predictor.grid(), noise);
  return ad::concat_cols(std::vector<ad::Var>{fr.z_initial, fr.z_graph}).value();
}

double validation_mape(const Predictor& predictor, std::span<const data::Trial> trials) {
  if (trials.empty()) throw TrainingError("validation set is empty");
  const auto preds = predict_mean(predictor, trials);
  const std::size_t n = predictor.config.condition_length;
  double total = 0.0;
  for (std::size_t r = 0; r < trials.size(); ++r) {
    const auto& values = trials[r].curve(predictor.config.metric).values;
    total += eval::mape(std::span(values).subspan(n), preds[r]);
  }
  return total / static_cast<double>(trials.size());
}

TrainResult train(std::span<const data::Trial> train_set, std::span<const data::Trial> validation_set,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw TrainingError("training set is empty");
  if (validation_set.empty()) throw TrainingError("validation set is empty");
  const std::size_t m = curve_length(train_set, config.metric);
  if (curve_length(validation_set, config.metric) != m) {
    throw TrainingError("training and validation curves have different lengths");
  }
  if (config.condition_length >= m) {
    throw TrainingError(fmt::format("condition length {} must be below the curve length {}", config.condition_length, m));
  }

  Predictor current{LcGode::create(config.model, config.seed), config, CurveTransform::fit(config.metric, train_set), m};
  OptimizerState state = OptimizerState::zeros_like(current.model.params());
  Rng shuffle_rng = make_rng(config.seed, "shuffle");
  Rng noise_rng = make_rng(config.seed, "noise");
  const ElboConfig elbo_config{config.obs_noise, config.kl_weight};
  const std::size_t d = config.model.latent_dim;

  TrainResult result{current, {}, 0, std::numeric_limits<double>::infinity(), false};
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t bad_epochs = 0;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochLog log{epoch, 0.0, 0.0, 0};
    std::size_t finite_steps = 0;
    std::string last_failure;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      const PreparedBatch b = prepare(train_set, std::span(order).subspan(start, count), current);
      const Matrix noise = standard_normal(count, d, noise_rng);
      ad::Tape tape;
      const auto bound = current.model.params().bind(tape);
      const auto weights = current.model.bind(bound);
      try {
        const ForwardResult fr = forward(tape, weights, config.model, b.prefix, b.graphs, current.grid(), noise);
        const ad::Var loss = -elbo(fr.predictions, b.targets, fr.posterior, elbo_config);
        const double value = loss.value().item();
        if (!std::isfinite(value)) {
          last_failure = "non-finite loss";
          ++log.skipped_steps;
          continue;
        }
        const ad::Gradients grads = ad::backward(tape, loss, current.model.params());
        if (!grads.all_finite()) {
          last_failure = "non-finite gradient";
          ++log.skipped_steps;
          continue;
        }
        adamw_step(current.model.params(), grads, state, config.learning_rate, config.weight_decay);
        log.train_loss += value;
        ++finite_steps;
      } catch (const ode::IntegrationError& e) {
        last_failure = e.what();
        ++log.skipped_steps;
      }
    }
    if (finite_steps == 0) {
      log.train_loss = std::numeric_limits<double>::quiet_NaN();
      if (++bad_epochs >= kMaxBadEpochs) {
        throw TrainingError(fmt::format("training diverged: no finite step for {} consecutive epochs (epoch {}, last: {})",
                                        bad_epochs, epoch, last_failure));
      }
    } else {
      log.train_loss /= static_cast<double>(finite_steps);
      bad_epochs = 0;
    }

    try {
      log.val_mape = validation_mape(current, validation_set);
    } catch (const ode::IntegrationError&) {
      log.val_mape = std::numeric_limits<double>::infinity();
    }
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);

    if (log.val_mape < result.best_val_mape) {
      result.best_val_mape = log.val_mape;
      result.best_epoch = epoch;
      result.predictor = current;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      result.early_stopped = true;
      break;
    }
  }
  if (result.best_epoch == 0) throw TrainingError("no epoch produced a finite validation error");
  return result;
}

Extrapolation extrapolate(const Predictor& predictor, std::span<const double> prefix,
                          const graph::ArchitectureGraph& graph, std::size_t samples, Rng& rng) {
  if (samples == 0) throw Error("extrapolate: need at least one sample");
  const Grid grid = predictor.grid();
  if (prefix.size() != grid.n) {
    throw ShapeError(fmt::format("extrapolate: prefix has {} values but the model conditions on {}", prefix.size(), grid.n));
  }
  const std::size_t d = predictor.model.config().latent_dim;
  Matrix batch_prefix(samples, grid.n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < grid.n; ++i) batch_prefix(s, i) = predictor.transform.forward(prefix[i]);
  }
  const std::vector<const graph::ArchitectureGraph*> graphs(samples, &graph);
  const Matrix noise = samples == 1 ? Matrix(1, d) : standard_normal(samples, d, rng);
  const Matrix raw = run_forward(predictor, batch_prefix, graphs, noise);

  Extrapolation out{std::vector<double>(grid.horizon(), 0.0), std::vector<double>(grid.horizon(), 0.0)};
  const double k = static_cast<double>(samples);
  for (std::size_t i = 0; i < grid.horizon(); ++i) {
    double sum = 0.0;
    for (std::size_t s = 0; s < samples; ++s) sum += raw(s, i);
    const double mean = sum / k;
    double sq = 0.0;
    for (std::size_t s = 0; s < samples; ++s) sq += (raw(s, i) - mean) * (raw(s, i) - mean);
    out.mean[i] = mean;
    out.std[i] = std::sqrt(sq / k);
  }
  return out;
}

std::vector<Extrapolation> extrapolate_all(const Predictor& predictor, std::span<const data::Trial> trials,
                                           std::size_t samples, std::uint64_t seed, std::size_t threads) {
  std::vector<Extrapolation> out(trials.size());
  const std::size_t n = predictor.config.condition_length;
  auto work = [&](std::size_t i) {
    const auto& values = trials[i].curve(predictor.config.metric).values;
    if (values.size() != predictor.epochs) {
      throw ShapeError(fmt::format("trial {} has {} epochs but the checkpoint was trained on {}", trials[i].trial_id,
                                   values.size(), predictor.epochs));
    }
    Rng rng = make_rng(seed, "predict", i);
    out[i] = extrapolate(predictor, std::span(values).first(n), trials[i].graph, samples, rng);
  };
  threads = std::max<std::size_t>(1, std::min(threads, trials.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < trials.size(); ++i) work(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < trials.size(); i += threads) work(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace lcgode::model
