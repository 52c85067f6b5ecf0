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

#include "cfran/knowledge_graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cfran {

KnowledgeGraph KnowledgeGraph::from_topology(const Topology& topology) {
  KnowledgeGraph g;
  for (int r = 0; r < topology.n_rrus(); ++r) g.add_entity(EntityKind::kRru, r);
  for (int c = 0; c < topology.n_rrus(); ++c) {
    const int cell = g.add_entity(EntityKind::kCell, c);
    g.relate(RelationKind::kServedBy, cell, *g.find(EntityKind::kRru, c));
  }
  for (int a = 0; a < topology.n_rrus(); ++a)
    for (int b = 0; b < topology.n_rrus(); ++b)
      if (a != b)
        g.relate(RelationKind::kNeighborOf, *g.find(EntityKind::kCell, a),
                 *g.find(EntityKind::kCell, b));
  for (int u = 0; u < topology.n_ues(); ++u) {
    const int ue = g.add_entity(EntityKind::kUe, u);
    g.relate(RelationKind::kServedBy, ue,
             *g.find(EntityKind::kCell, topology.ues[u].serving_cell));
  }
  return g;
}

int KnowledgeGraph::add_entity(EntityKind kind, int index) {
  const auto key = std::make_pair(kind, index);
  if (lookup_.contains(key)) throw std::invalid_argument("knowledge graph: duplicate entity");
  const int id = static_cast<int>(entities_.size());
  entities_.push_back({kind, index});
  lookup_.emplace(key, id);
  return id;
}

std::optional<int> KnowledgeGraph::find(EntityKind kind, int index) const {
  const auto it = lookup_.find({kind, index});
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

void KnowledgeGraph::relate(RelationKind kind, int from, int to) {
  const int n = static_cast<int>(entities_.size());
  if (from < 0 || to < 0 || from >= n || to >= n)
    throw std::out_of_range("knowledge graph: relation references unknown entity");
  if (!related(kind, from, to)) relations_.push_back({kind, from, to});
}

bool KnowledgeGraph::related(RelationKind kind, int from, int to) const {
  return std::any_of(relations_.begin(), relations_.end(), [&](const Relation& r) {
    return r.kind == kind && r.from == from && r.to == to;
  });
}

void KnowledgeGraph::record_rsrp(int ue, int cell, std::int64_t tti, double dbm) {
  const auto ue_id = find(EntityKind::kUe, ue);
  const auto cell_id = find(EntityKind::kCell, cell);
  if (!ue_id || !cell_id)
    throw std::out_of_range("knowledge graph: RSRP sample for unknown UE " + std::to_string(ue) +
                            " or cell " + std::to_string(cell));
  auto& samples = series_[{ue, cell}];
  if (samples.empty()) relate(RelationKind::kMeasures, *ue_id, *cell_id);
  if (!samples.empty() && tti < samples.back().tti)
    throw std::invalid_argument("knowledge graph: RSRP samples must be time-ordered");
  samples.push_back({tti, dbm});
}

std::span<const RsrpSample> KnowledgeGraph::series(int ue, int cell) const {
  const auto it = series_.find({ue, cell});
  if (it == series_.end()) return {};
  return it->second;
}

void KnowledgeGraph::prune_before(std::int64_t tti) {
  for (auto& [key, samples] : series_) {
    const auto keep = std::lower_bound(samples.begin(), samples.end(), tti,
                                       [](const RsrpSample& s, std::int64_t t) { return s.tti < t; });
    samples.erase(samples.begin(), keep);
  }
}

int KnowledgeGraph::count(EntityKind kind) const {
  return static_cast<int>(std::count_if(entities_.begin(), entities_.end(),
                                        [&](const Entity& e) { return e.kind == kind; }));
}

}  // namespace cfran
