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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lcgode/autodiff/errors.hpp"

namespace lcgode::graph {

enum class GraphKind { mlp, cnn_cell };

std::string_view to_string(GraphKind kind);
GraphKind parse_graph_kind(std::string_view text);

/// Operation labels on CNN cell edges. MLP edges always carry label 1.
enum EdgeLabel : int { zeroize = 0, conv1x1 = 1, conv3x3 = 2, avg_pool3x3 = 3 };
inline constexpr int kNumEdgeLabels = 4;

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  int label = 1;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

/// Labeled DAG describing an MLP (neurons + connections) or a CNN cell.
struct ArchitectureGraph {
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;
  GraphKind kind = GraphKind::mlp;

  /// Throws GraphError on out-of-range endpoints, duplicate (src, dst) pairs,
  /// or labels not allowed for the graph kind.
  void validate() const;

  /// Edges whose label is not zeroize.
  std::size_t effective_edge_count() const;

  /// Copy with node i renamed to perm[i].
  ArchitectureGraph relabeled(std::span<const std::size_t> perm) const;

  friend bool operator==(const ArchitectureGraph&, const ArchitectureGraph&) = default;
};

}  // namespace lcgode::graph
