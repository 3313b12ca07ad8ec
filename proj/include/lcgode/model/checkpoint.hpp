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

// Versioned JSON checkpoint: {format_version, config, tensors: name -> {shape, values}}.

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>

#include "lcgode/model/trainer.hpp"

namespace lcgode::model {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public Error {
 public:
  using Error::Error;
};

nlohmann::json config_to_json(const TrainConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
TrainConfig config_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const Predictor& predictor);
Predictor checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Predictor& predictor, const std::string& path);
Predictor load_checkpoint(const std::string& path);

}  // namespace lcgode::model
