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

// lcode: generate synthetic curves, train, extrapolate, rank and evaluate.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "lcgode/data/dataset_io.hpp"
#include "lcgode/data/synthetic.hpp"
#include "lcgode/eval/metrics.hpp"
#include "lcgode/model/checkpoint.hpp"
#include "lcgode/model/trainer.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lcgode;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool g_quiet = false;

template <class... Args>
void info(fmt::format_string<Args...> f, Args&&... args) {
  if (!g_quiet) fmt::print(stderr, "{}\n", fmt::format(f, std::forward<Args>(args)...));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", path.string()));
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

data::Dataset load_data(const fs::path& path) {
  auto result = data::load_dataset(path);
  for (const auto& w : result.warnings) fmt::print(stderr, "lcode: warning: {}\n", w);
  if (result.trials.empty()) throw std::runtime_error(fmt::format("dataset '{}' has no trials", path.string()));
  return std::move(result.trials);
}

void require_metric(const data::Dataset& trials, data::Metric metric) {
  for (const auto& t : trials) {
    if (!t.curves.contains(metric)) {
      throw std::runtime_error(fmt::format("trial {} has no '{}' curve", t.trial_id, data::to_string(metric)));
    }
  }
}

/// Every trial must live on the checkpoint's epoch grid.
void check_grid(const data::Dataset& trials, const model::Predictor& p) {
  require_metric(trials, p.config.metric);
  for (const auto& t : trials) {
    const auto& c = t.curve(p.config.metric);
    if (c.m() != p.epochs) {
      throw std::runtime_error(fmt::format("grid mismatch: trial {} has {} epochs but the checkpoint expects {}",
                                           t.trial_id, c.m(), p.epochs));
    }
    if (c.t_max != p.config.t_max) {
      throw std::runtime_error(fmt::format("grid mismatch: trial {} has t_max {} but the checkpoint expects {}",
                                           t.trial_id, c.t_max, p.config.t_max));
    }
  }
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::size_t trials = 550;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
  double noise = 0.0;
  double t_max = 1.0;
  std::string kind = "mlp";
  std::size_t neurons_per_node = 64;
  std::size_t threads = 1;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  if (a.trials < 4) throw UsageError(fmt::format("--trials {} is below the split minimum of 4", a.trials));
  data::SyntheticConfig c;
  c.num_trials = a.trials;
  c.epochs = a.epochs;
  c.seed = a.seed;
  c.noise = a.noise;
  c.t_max = a.t_max;
  c.kind = graph::parse_graph_kind(a.kind);
  c.graph_shape.neurons_per_node = a.neurons_per_node;
  c.threads = a.threads;
  const json config = {{"trials", a.trials},   {"epochs", a.epochs}, {"noise", a.noise},
                       {"t_max", a.t_max},     {"kind", a.kind},     {"neurons_per_node", a.neurons_per_node},
                       {"threads", a.threads}};
  cli::Manifest manifest("generate", config, a.seed);
  const auto t0 = std::chrono::steady_clock::now();
  const data::Dataset trials = data::generate_synthetic_dataset(c);
  manifest.add_timing("generate_seconds", seconds_since(t0));
  data::save_dataset(a.out, trials);
  manifest.add_output(a.out);
  manifest.write(a.out + ".manifest.json");
  info("wrote {} trials to {}", trials.size(), a.out);
  return 0;
}

// ---------------------------------------------------------------- split

struct SplitArgs {
  std::string data;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  std::string train_out;
  std::string test_out;
};

int run_split(const SplitArgs& a) {
  const data::Dataset trials = load_data(a.data);
  if (trials.size() < 2) throw std::runtime_error("need at least 2 trials to split");
  cli::Manifest manifest("split", {{"test_fraction", a.test_fraction}}, a.seed);
  manifest.add_input(a.data);
  Rng rng = make_rng(a.seed, "split");
  const auto [train, test] = data::split(trials, a.test_fraction, rng);
  data::save_dataset(a.train_out, train);
  data::save_dataset(a.test_out, test);
  manifest.add_output(a.train_out);
  manifest.add_output(a.test_out);
  manifest.write(a.train_out + ".manifest.json");
  info("split {} trials into {} train / {} test", trials.size(), train.size(), test.size());
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string out;
  std::string metric = "test_accuracy";
  std::string pooling = "mean";
  double val_fraction = 0.1;
  bool ablate_graph = false;
  bool decoder_hidden = false;
  model::TrainConfig config;
};

int run_train(TrainArgs a) {
  model::TrainConfig& c = a.config;
  c.metric = data::parse_metric(a.metric);
  c.model.pooling = graph::parse_pooling(a.pooling);
  c.model.ablate_graph = a.ablate_graph;
  c.model.decoder_hidden = a.decoder_hidden;
  if (!(a.val_fraction > 0.0 && a.val_fraction < 1.0)) throw UsageError("--val-fraction must lie in (0, 1)");

  const data::Dataset trials = load_data(a.data);
  require_metric(trials, c.metric);
  if (trials.size() < 2) throw std::runtime_error("need at least 2 trials (training and validation)");
  c.t_max = trials.front().curve(c.metric).t_max;
  for (const auto& t : trials) {
    if (t.curve(c.metric).t_max != c.t_max) throw std::runtime_error(fmt::format("trial {} has a different t_max", t.trial_id));
  }
  c.validate();

  json config = model::config_to_json(c);
  config["val_fraction"] = a.val_fraction;
  cli::Manifest manifest("train", config, c.seed);
  manifest.add_input(a.data);

  Rng rng = make_rng(c.seed, "validation");
  const auto [train_set, val_set] = data::split(trials, a.val_fraction, rng);
  info("training on {} trials, validating on {}", train_set.size(), val_set.size());

  const auto t0 = std::chrono::steady_clock::now();
  const auto result = model::train(train_set, val_set, c, [](const model::EpochLog& log) {
    if (log.epoch == 1 || log.epoch % 10 == 0) {
      info("epoch {:4d}  loss {:12.5f}  val_mape {:.6f}{}", log.epoch, log.train_loss, log.val_mape,
           log.skipped_steps ? fmt::format("  skipped {}", log.skipped_steps) : "");
    }
  });
  manifest.add_timing("train_seconds", seconds_since(t0));

  model::save_checkpoint(result.predictor, a.out);
  std::string csv = "epoch,train_loss,val_mape,skipped_steps\n";
  for (const auto& l : result.log) {
    csv += fmt::format("{},{:.17g},{:.17g},{}\n", l.epoch, l.train_loss, l.val_mape, l.skipped_steps);
  }
  const std::string log_path = a.out + ".log.csv";
  write_text(log_path, csv);
  manifest.add_output(a.out);
  manifest.add_output(log_path);
  manifest.write(a.out + ".manifest.json");
  info("best epoch {} (val MAPE {:.6f}){}; checkpoint {}", result.best_epoch, result.best_val_mape,
       result.early_stopped ? ", stopped early" : "", a.out);
  return 0;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string ckpt;
  std::string data;
  std::string out;
  std::size_t samples = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

int run_predict(const PredictArgs& a) {
  if (a.samples == 0) throw UsageError("--samples must be at least 1");
  const model::Predictor p = model::load_checkpoint(a.ckpt);
  const data::Dataset trials = load_data(a.data);
  check_grid(trials, p);
  cli::Manifest manifest("predict", {{"samples", a.samples}, {"threads", a.threads}, {"checkpoint", model::config_to_json(p.config)}}, a.seed);
  manifest.add_input(a.ckpt);
  manifest.add_input(a.data);

  const auto t0 = std::chrono::steady_clock::now();
  const auto preds = model::extrapolate_all(p, trials, a.samples, a.seed, a.threads);
  manifest.add_timing("inference_seconds", seconds_since(t0));

  std::string lines;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const json row = {{"trial_id", trials[i].trial_id},
                      {"metric", std::string(data::to_string(p.config.metric))},
                      {"condition_length", p.config.condition_length},
                      {"epochs", p.epochs},
                      {"t_max", p.config.t_max},
                      {"mean", preds[i].mean},
                      {"std", preds[i].std}};
    lines += row.dump() + '\n';
  }
  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_text(dir / "predictions.jsonl", lines);
  manifest.add_output((dir / "predictions.jsonl").string());
  manifest.write(dir / "manifest.json");
  info("wrote {} predicted curves to {}", trials.size(), (dir / "predictions.jsonl").string());
  return 0;
}

// ---------------------------------------------------------------- ranking helpers

struct Prediction {
  std::string trial_id;
  std::size_t condition_length = 0;
  std::size_t epochs = 0;
  std::vector<double> mean;
};


json ranking_block(const data::Dataset& trials, const std::map<std::string, const Prediction*>& preds,
                   data::Metric metric) {
  const bool minimize = data::minimize(metric);
  std::vector<eval::RankingEntry> entries;
  std::vector<double> truth, predicted;
  for (const auto& t : trials) {
    const Prediction& p = *preds.at(t.trial_id);
    const std::span<const double> values = t.curve(metric).values;
    entries.push_back(eval::ranking_entry(t.trial_id, values.first(p.condition_length), p.mean, values, minimize));
    predicted.push_back(entries.back().predicted_best);
    truth.push_back(entries.back().true_best);
  }
  const auto r = eval::regret_and_ranking(entries, minimize);
  json out = {{"num_trials", entries.size()},
              {"picked_trial", entries[r.picked].trial_id},
              {"picked_predicted_optimum", entries[r.picked].predicted_best},
              {"picked_true_optimum", entries[r.picked].true_best},
              {"regret", r.regret},
              {"ranking", r.ranking}};
  if (entries.size() >= 2) {
    const auto corr = eval::rank_correlation(truth, predicted);
    out["pearson"] = optional_json(corr.pearson);
    out["kendall_tau"] = optional_json(corr.kendall);
  } else {
    out["pearson"] = nullptr;
    out["kendall_tau"] = nullptr;
  }
  return out;
}

json speedup_block(const data::Dataset& trials, data::Metric metric, std::size_t condition_length,
                   double epoch_seconds, double inference_seconds) {
  double full = 0.0;
  for (const auto& t : trials) full += static_cast<double>(t.curve(metric).m()) * epoch_seconds;
  const double cond = static_cast<double>(trials.size() * condition_length) * epoch_seconds;
  return {{"epoch_seconds", epoch_seconds},
          {"full_training_seconds", full},
          {"conditioning_seconds", cond},
          {"inference_seconds", inference_seconds},
          {"speedup", eval::speedup(full, cond, inference_seconds)}};
}

// ---------------------------------------------------------------- rank

struct RankArgs {
  std::string ckpt;
  std::string data;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  double epoch_seconds = 1.0;
  std::optional<double> inference_seconds;
};

int run_rank(const RankArgs& a) {
  const model::Predictor p = model::load_checkpoint(a.ckpt);
  const data::Dataset trials = load_data(a.data);
  check_grid(trials, p);
  cli::Manifest manifest("rank", {{"epoch_seconds", a.epoch_seconds}, {"threads", a.threads}}, a.seed);
  manifest.add_input(a.ckpt);
  manifest.add_input(a.data);

  const auto t0 = std::chrono::steady_clock::now();
  const auto ext = model::extrapolate_all(p, trials, 1, a.seed, a.threads);
  const double measured = seconds_since(t0);
  manifest.add_timing("inference_seconds", measured);

  std::vector<Prediction> preds;
  std::map<std::string, const Prediction*> by_id;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    preds.push_back({trials[i].trial_id, p.config.condition_length, p.epochs, ext[i].mean});
  }
  for (const auto& pr : preds) by_id[pr.trial_id] = &pr;

  json summary = {{"metric", std::string(data::to_string(p.config.metric))},
                  {"seed", a.seed},
                  {"config", model::config_to_json(p.config)},
                  {"ranking", ranking_block(trials, by_id, p.config.metric)},
                  {"speedup", speedup_block(trials, p.config.metric, p.config.condition_length, a.epoch_seconds,
                                            a.inference_seconds.value_or(measured))}};
  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_text(dir / "rank_summary.json", summary.dump(2) + '\n');
  manifest.add_output((dir / "rank_summary.json").string());
  manifest.write(dir / "manifest.json");
  const auto& r = summary["ranking"];
  info("picked {}: regret {:.6f}, ranking {}/{}", r["picked_trial"].get<std::string>(), r["regret"].get<double>(),
       r["ranking"].get<std::size_t>(), r["num_trials"].get<std::size_t>());
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred;
  std::string data;
  std::string out;
  std::vector<std::size_t> pred_lens;
  double epoch_seconds = 1.0;
  std::optional<double> inference_seconds;
};

int run_eval(const EvalArgs& a) {
  const fs::path pred_dir(a.pred);
  const fs::path pred_file = pred_dir / "predictions.jsonl";
  std::ifstream in(pred_file);
  if (!in) throw std::runtime_error(fmt::format("cannot read '{}'", pred_file.string()));
  std::vector<Prediction> preds;
  std::string metric_name;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      preds.push_back({j.at("trial_id").get<std::string>(), j.at("condition_length").get<std::size_t>(),
                       j.at("epochs").get<std::size_t>(), j.at("mean").get<std::vector<double>>()});
      const auto m = j.at("metric").get<std::string>();
      if (!metric_name.empty() && m != metric_name) throw std::runtime_error("mixed metrics in predictions");
      metric_name = m;
    } catch (const json::exception& e) {
      throw std::runtime_error(fmt::format("{}:{}: {}", pred_file.string(), lineno, e.what()));
    }
  }
  if (preds.empty()) throw std::runtime_error(fmt::format("'{}' has no predictions", pred_file.string()));
  const data::Metric metric = data::parse_metric(metric_name);
  const std::size_t n = preds.front().condition_length;
  const std::size_t m = preds.front().epochs;

  const data::Dataset all = load_data(a.data);
  std::map<std::string, const data::Trial*> trial_by_id;
  for (const auto& t : all) trial_by_id[t.trial_id] = &t;
  data::Dataset trials;
  std::map<std::string, const Prediction*> pred_by_id;
  for (const auto& p : preds) {
    if (p.condition_length != n || p.epochs != m) throw std::runtime_error("predictions use different grids");
    const auto it = trial_by_id.find(p.trial_id);
    if (it == trial_by_id.end()) throw std::runtime_error(fmt::format("trial {} is not in the dataset", p.trial_id));
    const auto& curve = it->second->curve(metric);
    if (curve.m() != m || p.mean.size() != m - n) {
      throw std::runtime_error(fmt::format("grid mismatch for trial {}: dataset has {} epochs, predictions cover {}..{}",
                                           p.trial_id, curve.m(), n + 1, n + p.mean.size()));
    }
    trials.push_back(*it->second);
    pred_by_id[p.trial_id] = &p;
  }

  std::vector<std::size_t> lens = a.pred_lens.empty() ? std::vector<std::size_t>{m} : a.pred_lens;
  for (std::size_t len : lens) {
    if (len <= n || len > m) {
      throw UsageError(fmt::format("prediction length {} must lie in ({}, {}]", len, n, m));
    }
  }

  std::string csv = "trial_id,metric,pred_len,mape,rmse,guarded\n";
  json per_len = json::array();
  for (std::size_t len : lens) {
    double mape_sum = 0.0, rmse_sum = 0.0;
    std::size_t guarded = 0;
    for (const auto& t : trials) {
      const auto& values = t.curve(metric).values;
      const auto& p = *pred_by_id.at(t.trial_id);
      const std::span<const double> truth = std::span(values).subspan(n, len - n);
      const std::span<const double> pred = std::span(p.mean).first(len - n);
      const auto mp = eval::mape_checked(truth, pred);
      const double rm = eval::rmse(truth, pred);
      mape_sum += mp.value;
      rmse_sum += rm;
      guarded += mp.guarded;
      csv += fmt::format("{},{},{},{:.17g},{:.17g},{}\n", t.trial_id, metric_name, len, mp.value, rm, mp.guarded ? 1 : 0);
    }
    const double count = static_cast<double>(trials.size());
    per_len.push_back({{"pred_len", len},
                       {"trials", trials.size()},
                       {"mape", mape_sum / count},
                       {"rmse", rmse_sum / count},
                       {"guarded_trials", guarded}});
  }

  json pred_manifest = nullptr;
  std::ifstream mf(pred_dir / "manifest.json");
  if (mf) {
    try {
      mf >> pred_manifest;
    } catch (const json::exception&) {
      pred_manifest = nullptr;
    }
  }
  std::optional<double> inference = a.inference_seconds;
  if (!inference && pred_manifest.is_object() && pred_manifest.contains("timings") &&
      pred_manifest["timings"].contains("inference_seconds")) {
    inference = pred_manifest["timings"]["inference_seconds"].get<double>();
  }

  json summary = {{"metric", metric_name},
                  {"condition_length", n},
                  {"epochs", m},
                  {"aggregates", per_len},
                  {"ranking", ranking_block(trials, pred_by_id, metric)},
                  {"speedup", inference ? speedup_block(trials, metric, n, a.epoch_seconds, *inference) : json(nullptr)},
                  {"seed", pred_manifest.is_object() ? pred_manifest.value("seed", json(nullptr)) : json(nullptr)},
                  {"config", pred_manifest.is_object() ? pred_manifest.value("config", json(nullptr)) : json(nullptr)}};

  cli::Manifest manifest("eval", {{"pred_lens", lens}, {"epoch_seconds", a.epoch_seconds}}, 0);
  manifest.add_input(pred_file);
  manifest.add_input(a.data);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_text(dir / "eval.csv", csv);
  write_text(dir / "eval_summary.json", summary.dump(2) + '\n');
  manifest.add_output((dir / "eval.csv").string());
  manifest.add_output((dir / "eval_summary.json").string());
  manifest.write(dir / "manifest.json");
  for (const auto& row : per_len) {
    info("pred_len {:4d}  MAPE {:.6f}  RMSE {:.6f}", row["pred_len"].get<std::size_t>(), row["mape"].get<double>(),
         row["rmse"].get<double>());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning-curve extrapolation with an architecture-aware latent ODE"};
  app.set_config("--config", "", "INI/TOML key = value file; [subcommand] sections, flags take precedence");
  app.add_flag("-q,--quiet", g_quiet, "Suppress progress output");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Generate a synthetic learning-curve dataset (JSONL)");
  gen_cmd->add_option("--trials", gen.trials, "Number of trials")->capture_default_str();
  gen_cmd->add_option("--epochs", gen.epochs, "Epochs per curve")->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise, "Multiplicative log-normal noise sigma")->capture_default_str()->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--t-max", gen.t_max, "Curve time horizon")->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--kind", gen.kind, "Architecture family")->capture_default_str()->check(CLI::IsMember({"mlp", "cnn_cell"}));
  gen_cmd->add_option("--neurons-per-node", gen.neurons_per_node, "MLP neurons per graph node")->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--threads", gen.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out", gen.out, "Output JSONL path")->required();

  SplitArgs spl;
  auto* split_cmd = app.add_subcommand("split", "Split a dataset into train and test files");
  split_cmd->add_option("--data", spl.data, "Input JSONL")->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--test-fraction", spl.test_fraction, "Fraction of trials held out")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  split_cmd->add_option("--seed", spl.seed, "Random seed")->capture_default_str();
  split_cmd->add_option("--train-out", spl.train_out, "Training JSONL")->required();
  split_cmd->add_option("--test-out", spl.test_out, "Test JSONL")->required();

  TrainArgs tr;
  auto& tc = tr.config;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--data", tr.data, "Training JSONL")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  train_cmd->add_option("--metric", tr.metric, "Curve to model")->capture_default_str()->check(CLI::IsMember({"test_accuracy", "test_loss"}));
  train_cmd->add_option("--cond-len", tc.condition_length, "Observed epochs n")->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--latent-dim", tc.model.latent_dim, "Latent dimension D")->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", tc.epochs, "Training epochs")->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", tc.seed, "Random seed")->capture_default_str();
  train_cmd->add_option("--lr", tc.learning_rate, "Learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch-size", tc.batch_size, "Mini-batch size")->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--patience", tc.patience, "Early-stopping patience in epochs")->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--kl-weight", tc.kl_weight, "KL term weight")->capture_default_str()->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--obs-noise", tc.obs_noise, "Likelihood sigma")->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--weight-decay", tc.weight_decay, "AdamW weight decay")->capture_default_str()->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--pooling", tr.pooling, "Graph pooling")->capture_default_str()->check(CLI::IsMember({"mean", "max", "learnable"}));
  train_cmd->add_option("--gcn-layers", tc.model.gcn_layers, "GCN layers")->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--substeps", tc.model.ode_substeps, "RK4 steps per epoch interval")->capture_default_str()->check(CLI::PositiveNumber);
  train_cmd->add_option("--val-fraction", tr.val_fraction, "Fraction of trials used for early stopping")->capture_default_str();
  train_cmd->add_flag("--ablate-graph", tr.ablate_graph, "Train without the architecture embedding");
  train_cmd->add_flag("--decoder-hidden", tr.decoder_hidden, "Use a one-hidden-layer decoder");

  PredictArgs pr;
  auto* predict_cmd = app.add_subcommand("predict", "Extrapolate curves from their first n epochs");
  predict_cmd->add_option("--ckpt", pr.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", pr.data, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", pr.out, "Output directory")->required();
  predict_cmd->add_option("--samples", pr.samples, "Posterior samples K")->capture_default_str();
  predict_cmd->add_option("--seed", pr.seed, "Random seed")->capture_default_str();
  predict_cmd->add_option("--threads", pr.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  RankArgs rk;
  auto* rank_cmd = app.add_subcommand("rank", "Select the predicted-best configuration and report regret");
  rank_cmd->add_option("--ckpt", rk.ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  rank_cmd->add_option("--data", rk.data, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  rank_cmd->add_option("--out", rk.out, "Output directory")->required();
  rank_cmd->add_option("--seed", rk.seed, "Random seed")->capture_default_str();
  rank_cmd->add_option("--threads", rk.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  rank_cmd->add_option("--epoch-seconds", rk.epoch_seconds, "Source-training cost of one epoch")->capture_default_str()->check(CLI::PositiveNumber);
  rank_cmd->add_option("--inference-seconds", rk.inference_seconds, "Use this inference time instead of the measured one");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score predicted curves against the truth");
  eval_cmd->add_option("--pred", ev.pred, "Directory written by predict")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--data", ev.data, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", ev.out, "Output directory")->required();
  eval_cmd->add_option("--pred-lens", ev.pred_lens, "Comma-separated last epochs of the scored windows (default: m)")->delimiter(',');
  eval_cmd->add_option("--epoch-seconds", ev.epoch_seconds, "Source-training cost of one epoch")->capture_default_str()->check(CLI::PositiveNumber);
  eval_cmd->add_option("--inference-seconds", ev.inference_seconds, "Override the inference time read from the predict manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen_cmd) return run_generate(gen);
    if (*split_cmd) return run_split(spl);
    if (*train_cmd) return run_train(tr);
    if (*predict_cmd) return run_predict(pr);
    if (*rank_cmd) return run_rank(rk);
    if (*eval_cmd) return run_eval(ev);
  } catch (const UsageError& e) {
    fmt::print(stderr, "lcode: usage error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "lcode: error: {}\n", e.what());
    return 1;
  }
  return 1;
}
