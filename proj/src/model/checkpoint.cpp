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

#include "lcgode/model/checkpoint.hpp"

#include <fmt/format.h>
#include <fstream>
#include <set>

namespace lcgode::model {

using nlohmann::json;

namespace {

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json config_to_json(const TrainConfig& c) {
  return {
      {"latent_dim", c.model.latent_dim},
      {"gcn_layers", c.model.gcn_layers},
      {"pooling", std::string(graph::to_string(c.model.pooling))},
      {"decoder_hidden", c.model.decoder_hidden},
      {"ablate_graph", c.model.ablate_graph},
      {"ode_substeps", c.model.ode_substeps},
      {"metric", std::string(data::to_string(c.metric))},
      {"learning_rate", c.learning_rate},
      {"batch_size", c.batch_size},
      {"epochs", c.epochs},
      {"condition_length", c.condition_length},
      {"t_max", c.t_max},
      {"kl_weight", c.kl_weight},
      {"obs_noise", c.obs_noise},
      {"patience", c.patience},
      {"weight_decay", c.weight_decay},
      {"seed", c.seed},
  };
}

TrainConfig config_from_json(const json& j) {
  static const std::set<std::string> known{"latent_dim", "gcn_layers",   "pooling",      "decoder_hidden",
                                           "ablate_graph", "ode_substeps", "metric",     "learning_rate",
                                           "batch_size", "epochs",       "condition_length", "t_max",
                                           "kl_weight",  "obs_noise",    "patience",     "weight_decay",
                                           "seed"};
  if (!j.is_object()) throw CheckpointError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw CheckpointError(fmt::format("unknown config key '{}'", key));
  }
  TrainConfig c;
  try {
    read_field(j, "latent_dim", c.model.latent_dim);
    read_field(j, "gcn_layers", c.model.gcn_layers);
    if (j.contains("pooling")) c.model.pooling = graph::parse_pooling(j.at("pooling").get<std::string>());
    read_field(j, "decoder_hidden", c.model.decoder_hidden);
    read_field(j, "ablate_graph", c.model.ablate_graph);
    read_field(j, "ode_substeps", c.model.ode_substeps);
    if (j.contains("metric")) c.metric = data::parse_metric(j.at("metric").get<std::string>());
    read_field(j, "learning_rate", c.learning_rate);
    read_field(j, "batch_size", c.batch_size);
    read_field(j, "epochs", c.epochs);
    read_field(j, "condition_length", c.condition_length);
    read_field(j, "t_max", c.t_max);
    read_field(j, "kl_weight", c.kl_weight);
    read_field(j, "obs_noise", c.obs_noise);
    read_field(j, "patience", c.patience);
    read_field(j, "weight_decay", c.weight_decay);
    read_field(j, "seed", c.seed);
  } catch (const json::exception& e) {
    throw CheckpointError(fmt::format("bad config value: {}", e.what()));
  }
  return c;
}

json checkpoint_to_json(const Predictor& p) {
  json tensors = json::object();
  const auto& params = p.model.params();
  for (std::size_t id = 0; id < params.size(); ++id) {
    const Matrix& v = params.value(id);
    tensors[params.name(id)] = {{"shape", {v.rows(), v.cols()}}, {"values", v.storage()}};
  }
  const bool log_scale = p.transform.kind == CurveTransform::Kind::log_standardize;
  return {
      {"format_version", kCheckpointVersion},
      {"config", config_to_json(p.config)},
      {"epochs", p.epochs},
      {"transform", {{"kind", log_scale ? "log_standardize" : "identity"}, {"mean", p.transform.mean},
                     {"scale", p.transform.scale}}},
      {"tensors", tensors},
  };
}

Predictor checkpoint_from_json(const json& j) {
  try {
    if (!j.contains("format_version")) throw CheckpointError("checkpoint has no format_version");
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw CheckpointError(fmt::format("unsupported checkpoint format_version {} (expected {})", version,
                                        kCheckpointVersion));
    }
    const TrainConfig config = config_from_json(j.at("config"));
    Predictor p{LcGode::create(config.model, config.seed), config, {}, j.at("epochs").get<std::size_t>()};
    const json& tr = j.at("transform");
    const std::string kind = tr.at("kind").get<std::string>();
    if (kind == "identity") {
      p.transform.kind = CurveTransform::Kind::identity;
    } else if (kind == "log_standardize") {
      p.transform.kind = CurveTransform::Kind::log_standardize;
    } else {
      throw CheckpointError(fmt::format("unknown transform '{}'", kind));
    }
    p.transform.mean = tr.at("mean").get<double>();
    p.transform.scale = tr.at("scale").get<double>();
    p.grid().validate();

    const json& tensors = j.at("tensors");
    auto& params = p.model.params();
    if (tensors.size() != params.size()) {
      throw CheckpointError(fmt::format("checkpoint has {} tensors but the model has {}", tensors.size(), params.size()));
    }
    for (std::size_t id = 0; id < params.size(); ++id) {
      const std::string& name = params.name(id);
      if (!tensors.contains(name)) throw CheckpointError(fmt::format("checkpoint is missing tensor '{}'", name));
      const json& t = tensors.at(name);
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      auto values = t.at("values").get<std::vector<double>>();
      Matrix& target = params.value(id);
      if (shape.size() != 2 || shape[0] != target.rows() || shape[1] != target.cols() || values.size() != target.size()) {
        throw CheckpointError(fmt::format("tensor '{}' has the wrong shape for this configuration", name));
      }
      target = Matrix(target.rows(), target.cols(), std::move(values));
    }
    return p;
  } catch (const json::exception& e) {
    throw CheckpointError(fmt::format("malformed checkpoint: {}", e.what()));
  }
}

void save_checkpoint(const Predictor& predictor, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CheckpointError(fmt::format("cannot open '{}' for writing", path));
  out << checkpoint_to_json(predictor).dump(1) << '\n';
  if (!out) throw CheckpointError(fmt::format("failed writing '{}'", path));
}

Predictor load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError(fmt::format("cannot open checkpoint '{}'", path));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CheckpointError(fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
  return checkpoint_from_json(j);
}

}  // namespace lcgode::model
