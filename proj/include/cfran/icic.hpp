// Copyright 2026 The cfran Authors
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

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cfran/knowledge_graph.hpp"

namespace cfran {

/// RSRP reported for a (UE, cell) pair with no samples in the window.
inline constexpr double kMissingRsrpDbm = -300.0;

/// Feature data set: windowed mean RSRP per (UE, cell), averaged in dB.
struct Fds {
  Eigen::MatrixXd rsrp;  // n_ue x n_cell, dBm
  std::int64_t window_start = 0;  // inclusive
  std::int64_t window_end = 0;    // exclusive
};

/// Throws std::invalid_argument on an empty window (end <= start).
Fds extract_fds(const KnowledgeGraph& graph, std::int64_t window_start,
                std::int64_t window_end);

/// UE-level interference graph. edge_class[u] is set when u sees some other
/// cell within delta of its serving cell.
struct ConflictGraph {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // u < v, sorted, unique
  std::vector<bool> edge_class;
  std::vector<int> serving;  // empty when built from a bare edge list

  /// Graph from an explicit edge list; every endpoint is marked edge-class.
  static ConflictGraph from_edges(int n_nodes, std::vector<std::pair<int, int>> edges);

  std::vector<std::vector<int>> adjacency() const;
  bool has_edge(int u, int v) const;
  int degree(int u) const;
};

/// UE u (served by a) is edge-class w.r.t. cell b != a iff
/// rsrp[u][b] >= rsrp[u][a] - delta_db; (u, v) conflict iff either UE is
/// edge-class w.r.t. the other's serving cell. Missing samples never
/// qualify a neighbor.
ConflictGraph build_conflict_graph(const Fds& fds, std::span<const int> serving,
                                   double delta_db);

/// Highest-degree-first greedy coloring restricted to `members` (degrees
/// counted inside that subgraph, ties to the lower index, lowest free color).
/// Non-members get -1.
std::vector<int> greedy_coloring(const ConflictGraph& graph, const std::vector<bool>& members);

enum class UeClass { kCenter, kEdge };

/// Preconfigured PRB sets.
///
/// The reserved edge band sits at the top of the carrier and is split into
/// one equal set per color; the rest is the common band. An edge UE owns its
/// color's set and may borrow common-band PRBs that center UEs leave idle. A
/// center UE with no conflicts uses the full band; a center UE that conflicts
/// with some edge UE is kept to the common band, so the reserved sets stay
/// free of conflicting transmissions.
struct PrbPlan {
  int n_prbs = 0;
  double edge_fraction = 0.0;  // reserved PRBs / n_prbs actually used
  std::vector<std::vector<int>> sets;  // per color
  std::vector<int> common_band;
  std::vector<UeClass> ue_class;
  std::vector<int> color;  // -1 for center UEs
  std::vector<bool> common_only;
  bool fallback = false;  // coloring exceeded max_colors; full reuse applied

  /// Every PRB the UE may be scheduled on.
  std::vector<int> allowed_prbs(int ue) const;
  /// PRBs where the UE is served first: the color set for edge UEs, the
  /// allowed set otherwise.
  std::vector<int> priority_prbs(int ue) const;
  bool operator==(const PrbPlan&) const = default;
};

/// Every UE center-class on the full band, nothing reserved.
PrbPlan fr_plan(int n_prbs, int n_ues);

/// Colors the edge-class UEs that have at least one conflict and splits
/// floor(edge_fraction * n_prbs) reserved PRBs equally among the colors.
/// Needing more than max_colors colors, or more colors than reserved PRBs,
/// yields the full-reuse plan with `fallback` set.
PrbPlan color_prbs(const ConflictGraph& conflict, int n_prbs, double edge_fraction,
                   int max_colors = 3);

// Non-RT tuner -------------------------------------------------------------

struct IcicAction {
  double delta_db;
  double edge_fraction;
  bool operator==(const IcicAction&) const = default;
};

/// Delta grid {4, 6, 8, 10, 12} dB x edge fraction {1/4, 1/3, 1/2}.
std::vector<IcicAction> default_action_grid();

/// Tabular epsilon-greedy state. `current` is the action in force.
struct IcicParams {
  std::vector<IcicAction> actions = default_action_grid();
  std::vector<double> q = std::vector<double>(actions.size(), 0.0);
  int current = 0;
  double epsilon = 0.1;
  double alpha = 0.5;

  double delta_db() const { return actions.at(current).delta_db; }
  double edge_fraction() const { return actions.at(current).edge_fraction; }

  /// Default grid starting from (10 dB, 1/4).
  static IcicParams defaults();
  void validate() const;
};

/// Q(current) <- (1 - alpha) Q(current) + alpha * delivered / offered, then
/// picks the next action epsilon-greedily (greedy ties to the lowest index).
/// Deterministic in (params, rewards, seed).
IcicParams rl_update(const IcicParams& params, double delivered_bits, double offered_bits,
                     std::uint64_t seed);

}  // namespace cfran
