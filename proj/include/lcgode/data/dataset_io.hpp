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

// JSON Lines dataset files, one trial per line:
//
//   {"trial_id": str,
//    "arch": {"kind": "mlp"|"cnn_cell", "num_nodes": int, "edges": [[src, dst, label], ...]},
//    "hyperparams": {...},
//    "curves": {"test_loss": {"m": int, "t_max": float, "values": [...]}, "test_accuracy": {...}}}

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lcgode/data/curves.hpp"
#include "lcgode/rng.hpp"

namespace lcgode::data {

struct LoadResult {
  Dataset trials;
  std::vector<std::string> warnings;  // unknown keys, one entry per occurrence
};

nlohmann::json trial_to_json(const Trial& trial);
/// Throws DataError naming the field (and trial_id when known).
Trial trial_from_json(const nlohmann::json& j, std::vector<std::string>* warnings = nullptr);

void write_dataset(std::ostream& out, const Dataset& trials);
void save_dataset(const std::filesystem::path& path, const Dataset& trials);

/// Rejects malformed lines (with line number) and curves whose length differs
/// across trials for the same metric.
LoadResult read_dataset(std::istream& in);
LoadResult load_dataset(const std::filesystem::path& path);

/// Seeded shuffle of whole trials; round(test_fraction * N) go to the test set
/// (at least one trial on each side).
std::pair<Dataset, Dataset> split(const Dataset& trials, double test_fraction, Rng& rng);

}  // namespace lcgode::data
