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

#include "lcgode/data/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numeric>
#include <set>

namespace lcgode::data {

using nlohmann::json;

namespace {

void warn_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where,
                  std::vector<std::string>* warnings) {
  if (warnings == nullptr) return;
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      warnings->push_back(fmt::format("{}: ignoring unknown key '{}'", where, key));
    }
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw DataError(fmt::format("{}: expected an object", where));
  const auto it = obj.find(key);
  if (it == obj.end()) throw DataError(fmt::format("{}: missing \"{}\"", where, key));
  return *it;
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw DataError(fmt::format("{}: field \"{}\" has the wrong type", where, key));
  }
}

}  // namespace

json trial_to_json(const Trial& trial) {
  json edges = json::array();
  for (const auto& e : trial.graph.edges) edges.push_back({e.src, e.dst, e.label});
  json curves = json::object();
  for (const auto& [metric, c] : trial.curves) {
    curves[std::string(to_string(metric))] = {{"m", c.m()}, {"t_max", c.t_max}, {"values", c.values}};
  }
  return {{"trial_id", trial.trial_id},
          {"arch",
           {{"kind", std::string(graph::to_string(trial.graph.kind))},
            {"num_nodes", trial.graph.num_nodes},
            {"edges", std::move(edges)}}},
          {"hyperparams", trial.hyperparams},
          {"curves", std::move(curves)}};
}

Trial trial_from_json(const json& j, std::vector<std::string>* warnings) {
  if (!j.is_object()) throw DataError("trial is not a JSON object");
  Trial t;
  t.trial_id = get<std::string>(j, "trial_id", "trial");
  const std::string where = fmt::format("trial '{}'", t.trial_id);
  warn_unknown(j, {"trial_id", "arch", "hyperparams", "curves"}, where, warnings);

  const json& arch = field(j, "arch", where);
  const std::string arch_where = where + " arch";
  warn_unknown(arch, {"kind", "num_nodes", "edges"}, arch_where, warnings);
  try {
    t.graph.kind = graph::parse_graph_kind(get<std::string>(arch, "kind", arch_where));
  } catch (const graph::GraphError& e) {
    throw DataError(fmt::format("{}: {}", arch_where, e.what()));
  }
  t.graph.num_nodes = get<std::size_t>(arch, "num_nodes", arch_where);
  for (const json& e : field(arch, "edges", arch_where)) {
    if (!e.is_array() || e.size() != 3) throw DataError(fmt::format("{}: each edge must be [src, dst, label]", arch_where));
    try {
      t.graph.edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<int>()});
    } catch (const json::exception&) {
      throw DataError(fmt::format("{}: edge entries must be non-negative integers", arch_where));
    }
  }
  try {
    t.graph.validate();
  } catch (const graph::GraphError& e) {
    throw DataError(fmt::format("{}: {}", arch_where, e.what()));
  }

  if (const auto it = j.find("hyperparams"); it != j.end()) {
    if (!it->is_object()) throw DataError(fmt::format("{}: \"hyperparams\" must be an object", where));
    t.hyperparams = *it;
  }

  const json& curves = field(j, "curves", where);
  if (!curves.is_object() || curves.empty()) throw DataError(fmt::format("{}: \"curves\" must be a non-empty object", where));
  for (const auto& [key, c] : curves.items()) {
    Metric metric{};
    try {
      metric = parse_metric(key);
    } catch (const DataError&) {
      if (warnings) warnings->push_back(fmt::format("{}: ignoring unknown curve '{}'", where, key));
      continue;
    }
    const std::string cw = fmt::format("{} curve {}", where, key);
    warn_unknown(c, {"m", "t_max", "values"}, cw, warnings);
    LearningCurve curve{metric, get<std::vector<double>>(c, "values", cw), get<double>(c, "t_max", cw)};
    const auto m = get<std::size_t>(c, "m", cw);
    if (m != curve.values.size()) {
      throw DataError(fmt::format("{}: m = {} but {} values", cw, m, curve.values.size()));
    }
    try {
      curve.validate();
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}: {}", cw, e.what()));
    }
    t.curves.emplace(metric, std::move(curve));
  }
  if (t.curves.empty()) throw DataError(fmt::format("{}: no recognised curves", where));
  return t;
}

void write_dataset(std::ostream& out, const Dataset& trials) {
  for (const Trial& t : trials) out << trial_to_json(t).dump() << '\n';
}

void save_dataset(const std::filesystem::path& path, const Dataset& trials) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot open '{}' for writing", path.string()));
  write_dataset(out, trials);
  if (!out) throw DataError(fmt::format("failed writing '{}'", path.string()));
}

LoadResult read_dataset(std::istream& in) {
  LoadResult result;
  std::map<Metric, std::pair<std::size_t, std::string>> lengths;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(fmt::format("line {}: invalid JSON ({})", line_no, e.what()));
    }
    Trial t;
    try {
      t = trial_from_json(j, &result.warnings);
    } catch (const DataError& e) {
      throw DataError(fmt::format("line {}: {}", line_no, e.what()));
    }
    if (!ids.insert(t.trial_id).second) throw DataError(fmt::format("line {}: duplicate trial_id '{}'", line_no, t.trial_id));
    for (const auto& [metric, c] : t.curves) {
      auto [it, inserted] = lengths.emplace(metric, std::pair{c.m(), t.trial_id});
      if (!inserted && it->second.first != c.m()) {
        throw DataError(fmt::format("line {}: trial '{}' {} curve has {} epochs but trial '{}' has {}", line_no,
                                    t.trial_id, to_string(metric), c.m(), it->second.second, it->second.first));
      }
    }
    result.trials.push_back(std::move(t));
  }
  return result;
}

LoadResult load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open dataset '{}'", path.string()));
  return read_dataset(in);
}

std::pair<Dataset, Dataset> split(const Dataset& trials, double test_fraction, Rng& rng) {
  if (trials.size() < 2) throw DataError("split: need at least two trials");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError(fmt::format("split: test fraction {} outside (0, 1)", test_fraction));
  }
  std::vector<std::size_t> order(trials.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(trials.size())));
  n_test = std::clamp<std::size_t>(n_test, 1, trials.size() - 1);
  Dataset train, test;
  std::vector<std::size_t> test_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  // Keep file order within each side.
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  for (std::size_t i : train_idx) train.push_back(trials[i]);
  for (std::size_t i : test_idx) test.push_back(trials[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace lcgode::data
