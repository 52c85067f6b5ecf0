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

#include "cfran/icic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cfran/rng.hpp"

namespace cfran {

Fds extract_fds(const KnowledgeGraph& graph, std::int64_t window_start,
                std::int64_t window_end) {
  if (window_end <= window_start)
    throw std::invalid_argument("extract_fds: empty window [" + std::to_string(window_start) +
                                ", " + std::to_string(window_end) + ")");
  const int n_ue = graph.count(EntityKind::kUe);
  const int n_cell = graph.count(EntityKind::kCell);
  Fds fds;
  fds.window_start = window_start;
  fds.window_end = window_end;
  fds.rsrp = Eigen::MatrixXd::Constant(n_ue, n_cell, kMissingRsrpDbm);
  for (int u = 0; u < n_ue; ++u)
    for (int c = 0; c < n_cell; ++c) {
      double sum = 0.0;
      int count = 0;
      for (const auto& s : graph.series(u, c))
        if (s.tti >= window_start && s.tti < window_end) {
          sum += s.dbm;
          ++count;
        }
      if (count > 0) fds.rsrp(u, c) = sum / count;
    }
  return fds;
}

ConflictGraph ConflictGraph::from_edges(int n_nodes, std::vector<std::pair<int, int>> edges) {
  ConflictGraph g;
  g.n_nodes = n_nodes;
  g.edge_class.assign(n_nodes, false);
  for (auto& [u, v] : edges) {
    if (u == v) throw std::invalid_argument("conflict graph: self-loop");
    if (u < 0 || v < 0 || u >= n_nodes || v >= n_nodes)
      throw std::out_of_range("conflict graph: node out of range");
    if (u > v) std::swap(u, v);
    g.edge_class[u] = g.edge_class[v] = true;
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  g.edges = std::move(edges);
  return g;
}

std::vector<std::vector<int>> ConflictGraph::adjacency() const {
  std::vector<std::vector<int>> adj(n_nodes);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  return adj;
}

bool ConflictGraph::has_edge(int u, int v) const {
  if (u > v) std::swap(u, v);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

int ConflictGraph::degree(int u) const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(), [u](const auto& e) {
    return e.first == u || e.second == u;
  }));
}

ConflictGraph build_conflict_graph(const Fds& fds, std::span<const int> serving,
                                   double delta_db) {
  const int n_ue = static_cast<int>(fds.rsrp.rows());
  const int n_cell = static_cast<int>(fds.rsrp.cols());
  if (static_cast<int>(serving.size()) != n_ue)
    throw std::invalid_argument("build_conflict_graph: serving list does not match the FDS");
  ConflictGraph g;
  g.n_nodes = n_ue;
  g.edge_class.assign(n_ue, false);
  g.serving.assign(serving.begin(), serving.end());
  for (int u = 0; u < n_ue; ++u) {
    const int a = serving[u];
    if (a < 0 || a >= n_cell) throw std::out_of_range("build_conflict_graph: serving cell out of range");
    for (int b = 0; b < n_cell; ++b) {
      if (b == a || fds.rsrp(u, b) <= kMissingRsrpDbm) continue;
      if (fds.rsrp(u, b) < fds.rsrp(u, a) - delta_db) continue;
      g.edge_class[u] = true;
      for (int v = 0; v < n_ue; ++v)
        if (serving[v] == b) g.edges.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

std::vector<int> greedy_coloring(const ConflictGraph& graph, const std::vector<bool>& members) {
  const auto adj = graph.adjacency();
  std::vector<int> degree(graph.n_nodes, 0);
  std::vector<int> order;
  for (int u = 0; u < graph.n_nodes; ++u) {
    if (!members[u]) continue;
    order.push_back(u);
    for (int v : adj[u])
      if (members[v]) ++degree[u];
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return degree[a] > degree[b]; });

  std::vector<int> color(graph.n_nodes, -1);
  std::vector<bool> taken;
  for (int u : order) {
    taken.assign(order.size() + 1, false);
    for (int v : adj[u])
      if (color[v] >= 0) taken[color[v]] = true;
    int c = 0;
    while (taken[c]) ++c;
    color[u] = c;
  }
  return color;
}

std::vector<int> PrbPlan::allowed_prbs(int ue) const {
  if (ue_class.at(ue) == UeClass::kEdge) {
    std::vector<int> out = common_band;
    const auto& own = sets.at(color.at(ue));
    out.insert(out.end(), own.begin(), own.end());
    return out;
  }
  return priority_prbs(ue);
}

std::vector<int> PrbPlan::priority_prbs(int ue) const {
  if (ue_class.at(ue) == UeClass::kEdge) return sets.at(color.at(ue));
  if (common_only.at(ue)) return common_band;
  std::vector<int> all(n_prbs);
  std::iota(all.begin(), all.end(), 0);
  return all;
}

PrbPlan fr_plan(int n_prbs, int n_ues) {
  PrbPlan plan;
  plan.n_prbs = n_prbs;
  plan.common_band.resize(n_prbs);
  std::iota(plan.common_band.begin(), plan.common_band.end(), 0);
  plan.ue_class.assign(n_ues, UeClass::kCenter);
  plan.color.assign(n_ues, -1);
  plan.common_only.assign(n_ues, false);
  return plan;
}

PrbPlan color_prbs(const ConflictGraph& conflict, int n_prbs, double edge_fraction,
                   int max_colors) {
  if (n_prbs < 1) throw std::invalid_argument("color_prbs: need at least one PRB");
  if (!(edge_fraction > 0.0 && edge_fraction < 1.0))
    throw std::invalid_argument("color_prbs: edge fraction must lie in (0, 1)");
  const int n = conflict.n_nodes;
  std::vector<int> degree(n, 0);
  for (const auto& [u, v] : conflict.edges) ++degree[u], ++degree[v];

  std::vector<bool> members(n, false);
  for (int u = 0; u < n; ++u) members[u] = conflict.edge_class[u] && degree[u] > 0;
  const std::vector<int> color = greedy_coloring(conflict, members);
  const int n_colors = color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;

  PrbPlan plan = fr_plan(n_prbs, n);
  if (n_colors == 0) return plan;
  const int reserved = static_cast<int>(std::floor(edge_fraction * n_prbs));
  const int per_color = reserved / n_colors;
  if (n_colors > max_colors || per_color < 1) {
    plan.fallback = true;
    return plan;
  }

  const int first_reserved = n_prbs - per_color * n_colors;
  plan.edge_fraction = static_cast<double>(per_color * n_colors) / n_prbs;
  plan.common_band.resize(first_reserved);
  plan.sets.resize(n_colors);
  for (int c = 0; c < n_colors; ++c)
    for (int k = 0; k < per_color; ++k) plan.sets[c].push_back(first_reserved + c * per_color + k);
  for (int u = 0; u < n; ++u) {
    if (color[u] >= 0) {
      plan.ue_class[u] = UeClass::kEdge;
      plan.color[u] = color[u];
    } else {
      plan.common_only[u] = degree[u] > 0;
    }
  }
  return plan;
}

std::vector<IcicAction> default_action_grid() {
  std::vector<IcicAction> grid;
  for (double delta : {4.0, 6.0, 8.0, 10.0, 12.0})
    for (double fraction : {1.0 / 4.0, 1.0 / 3.0, 1.0 / 2.0}) grid.push_back({delta, fraction});
  return grid;
}

IcicParams IcicParams::defaults() {
  IcicParams p;
  const auto it = std::find(p.actions.begin(), p.actions.end(), IcicAction{10.0, 1.0 / 4.0});
  p.current = static_cast<int>(it - p.actions.begin());
  return p;
}

void IcicParams::validate() const {
  if (actions.empty()) throw std::invalid_argument("icic params: empty action grid");
  if (q.size() != actions.size()) throw std::invalid_argument("icic params: Q table size mismatch");
  if (current < 0 || current >= static_cast<int>(actions.size()))
    throw std::invalid_argument("icic params: current action out of range");
  for (const auto& a : actions)
    if (!(a.edge_fraction > 0.0 && a.edge_fraction < 1.0))
      throw std::invalid_argument("icic params: edge fraction must lie in (0, 1)");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("icic params: epsilon outside [0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("icic params: alpha outside [0, 1]");
}

IcicParams rl_update(const IcicParams& params, double delivered_bits, double offered_bits,
                     std::uint64_t seed) {
  params.validate();
  if (!std::isfinite(delivered_bits) || delivered_bits < 0.0)
    throw std::invalid_argument("rl_update: reward must be finite and non-negative");
  IcicParams next = params;
  const double reward = offered_bits > 0.0 ? delivered_bits / offered_bits : 0.0;
  double& q = next.q[next.current];
  q = (1.0 - next.alpha) * q + next.alpha * reward;

  Rng rng(seed);
  if (rng.uniform() < next.epsilon) {
    next.current = static_cast<int>(rng.below(next.actions.size()));
  } else {
    next.current = static_cast<int>(std::max_element(next.q.begin(), next.q.end()) - next.q.begin());
  }
  return next;
}

}  // namespace cfran
