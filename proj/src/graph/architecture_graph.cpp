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

#include "lcgode/graph/architecture_graph.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <set>
#include <utility>

namespace lcgode::graph {

std::string_view to_string(GraphKind kind) { return kind == GraphKind::mlp ? "mlp" : "cnn_cell"; }

GraphKind parse_graph_kind(std::string_view text) {
  if (text == "mlp") return GraphKind::mlp;
  if (text == "cnn_cell") return GraphKind::cnn_cell;
  throw GraphError(fmt::format("unknown graph kind '{}'", text));
}

void ArchitectureGraph::validate() const {
  if (num_nodes == 0) throw GraphError("graph must have at least one node");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.src >= num_nodes || e.dst >= num_nodes) {
      throw GraphError(fmt::format("edge {} ({} -> {}) references a node outside [0, {})", i, e.src, e.dst, num_nodes));
    }
    if (!seen.emplace(e.src, e.dst).second) {
      throw GraphError(fmt::format("duplicate edge {} -> {}", e.src, e.dst));
    }
    if (kind == GraphKind::mlp && e.label != 1) {
      throw GraphError(fmt::format("mlp edge {} -> {} has label {}, expected 1", e.src, e.dst, e.label));
    }
    if (kind == GraphKind::cnn_cell && (e.label < 0 || e.label >= kNumEdgeLabels)) {
      throw GraphError(fmt::format("cnn_cell edge {} -> {} has label {}, expected 0..3", e.src, e.dst, e.label));
    }
  }
}

std::size_t ArchitectureGraph::effective_edge_count() const {
  return static_cast<std::size_t>(
      std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return e.label != zeroize; }));
}

ArchitectureGraph ArchitectureGraph::relabeled(std::span<const std::size_t> perm) const {
  if (perm.size() != num_nodes) throw GraphError("relabeled: permutation size differs from node count");
  ArchitectureGraph out{num_nodes, {}, kind};
  out.edges.reserve(edges.size());
  for (const Edge& e : edges) out.edges.push_back({perm[e.src], perm[e.dst], e.label});
  return out;
}

}  // namespace lcgode::graph
