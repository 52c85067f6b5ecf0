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
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cfran/channel.hpp"

namespace cfran {

enum class EntityKind { kUe, kCell, kRru };
enum class RelationKind { kServedBy, kNeighborOf, kMeasures };

struct Entity {
  EntityKind kind;
  int index;  // UE, cell or RRU index in the topology
};

struct Relation {
  RelationKind kind;
  int from;  // entity ids
  int to;
};

struct RsrpSample {
  std::int64_t tti;
  double dbm;
};

/// Minimal typed-graph data plane. Entities and relations describe who is
/// connected to whom; RSRP time series hang off (UE, cell) `measures` edges.
///
/// Single writer. Readers that need a consistent view across a window take a
/// copy (the type is a regular value).
class KnowledgeGraph {
 public:
  /// UE, cell and RRU entities; UE servedBy cell, cell servedBy RRU, and
  /// neighborOf between every pair of distinct cells.
  static KnowledgeGraph from_topology(const Topology& topology);

  int add_entity(EntityKind kind, int index);
  std::optional<int> find(EntityKind kind, int index) const;
  void relate(RelationKind kind, int from, int to);
  bool related(RelationKind kind, int from, int to) const;

  /// Appends a sample; the first sample of a pair creates its measures edge.
  /// Samples of one pair must arrive in non-decreasing TTI order.
  void record_rsrp(int ue, int cell, std::int64_t tti, double dbm);

  std::span<const RsrpSample> series(int ue, int cell) const;

  /// Drops samples older than `tti`.
  void prune_before(std::int64_t tti);

  int count(EntityKind kind) const;
  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<Relation>& relations() const { return relations_; }

 private:
  std::vector<Entity> entities_;
  std::vector<Relation> relations_;
  std::map<std::pair<EntityKind, int>, int> lookup_;
  std::map<std::pair<int, int>, std::vector<RsrpSample>> series_;
};

}  // namespace cfran
