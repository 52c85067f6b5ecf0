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

#include <doctest.h>

#include <algorithm>
#include <set>

#include "cfran/icic.hpp"
#include "cfran/knowledge_graph.hpp"
#include "cfran/orchestrator.hpp"
#include "cfran/rng.hpp"
#include "oracles.hpp"

using namespace cfran;

namespace {

ConflictGraph random_graph(int n, double p, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform() < p) edges.emplace_back(u, v);
  return ConflictGraph::from_edges(n, edges);
}

bool proper(const ConflictGraph& g, const std::vector<int>& color) {
  for (const auto& [u, v] : g.edges)
    if (color[u] >= 0 && color[u] == color[v]) return false;
  return true;
}

int colors_used(const std::vector<int>& color) {
  return color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;
}

Fds fds_from(const Eigen::MatrixXd& rsrp) {
  Fds f;
  f.rsrp = rsrp;
  f.window_start = 0;
  f.window_end = 1;
  return f;
}

}  // namespace

TEST_SUITE("icic") {

TEST_CASE("knowledge graph from topology") {
  const Topology t = icic_layout();
  const KnowledgeGraph g = KnowledgeGraph::from_topology(t);
  CHECK(g.count(EntityKind::kUe) == 6);
  CHECK(g.count(EntityKind::kCell) == 3);
  CHECK(g.count(EntityKind::kRru) == 3);
  const int ue1 = *g.find(EntityKind::kUe, 1);
  const int cell0 = *g.find(EntityKind::kCell, 0);
  const int cell1 = *g.find(EntityKind::kCell, 1);
  CHECK(g.related(RelationKind::kServedBy, ue1, cell0));
  CHECK_FALSE(g.related(RelationKind::kServedBy, ue1, cell1));
  CHECK(g.related(RelationKind::kNeighborOf, cell0, cell1));
  CHECK_FALSE(g.find(EntityKind::kUe, 6).has_value());
}

TEST_CASE("rsrp series keep time order") {
  KnowledgeGraph g = KnowledgeGraph::from_topology(icic_layout());
  const int ue = *g.find(EntityKind::kUe, 0);
  const int cell = *g.find(EntityKind::kCell, 2);
  CHECK_FALSE(g.related(RelationKind::kMeasures, ue, cell));
  g.record_rsrp(0, 2, 5, -90.0);
  CHECK(g.related(RelationKind::kMeasures, ue, cell));
  g.record_rsrp(0, 2, 5, -91.0);
  g.record_rsrp(0, 2, 9, -92.0);
  CHECK_THROWS_AS(g.record_rsrp(0, 2, 8, -93.0), std::invalid_argument);
  CHECK(g.series(0, 2).size() == 3);
  g.prune_before(6);
  REQUIRE(g.series(0, 2).size() == 1);
  CHECK(g.series(0, 2)[0].tti == 9);
  CHECK(g.series(1, 1).empty());
  for (const auto& r : g.relations())
    if (r.kind == RelationKind::kMeasures) {
      CHECK(r.from < static_cast<int>(g.entities().size()));
      CHECK(r.to < static_cast<int>(g.entities().size()));
    }
}

TEST_CASE("fds window means in dB") {
  Topology t;
  t.rrus = {Rru{}, Rru{{100.0, 0.0}}};
  t.ues = {Ue{{10.0, 0.0}, 1, 0}};
  t.n_subcarriers = t.n_prbs = 1;
  KnowledgeGraph g = KnowledgeGraph::from_topology(t);
  g.record_rsrp(0, 0, 0, -80.0);
  g.record_rsrp(0, 0, 1, -90.0);
  g.record_rsrp(0, 0, 7, -10.0);  // outside the window
  const Fds f = extract_fds(g, 0, 5);
  CHECK(f.rsrp(0, 0) == doctest::Approx(-85.0));
  CHECK(f.rsrp(0, 1) == kMissingRsrpDbm);
  CHECK(extract_fds(g, 1, 2).rsrp(0, 0) == -90.0);
  CHECK_THROWS_AS(extract_fds(g, 3, 3), std::invalid_argument);
}

TEST_CASE("conflict rule arithmetic") {
  Eigen::MatrixXd r(2, 2);
  r << -90.0, -95.0,   // UE 0 in cell 0: neighbor within 10 dB
      -110.0, -60.0;   // UE 1 in cell 1: neighbor 50 dB down
  const std::vector<int> serving = {0, 1};
  const ConflictGraph g = build_conflict_graph(fds_from(r), serving, 10.0);
  CHECK(g.edge_class[0]);
  CHECK_FALSE(g.edge_class[1]);
  CHECK(g.has_edge(0, 1));

  const ConflictGraph none = build_conflict_graph(fds_from(r), serving, 0.0);
  CHECK(none.edges.empty());

  r(0, 1) = kMissingRsrpDbm;
  r(1, 0) = kMissingRsrpDbm;
  CHECK(build_conflict_graph(fds_from(r), serving, 500.0).edges.empty());
}

TEST_CASE("conflict edges grow with delta") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n_ue = 8, n_cell = 4;
    Eigen::MatrixXd r(n_ue, n_cell);
    std::vector<int> serving(n_ue);
    for (int u = 0; u < n_ue; ++u) {
      serving[u] = static_cast<int>(rng.below(n_cell));
      for (int c = 0; c < n_cell; ++c) r(u, c) = -120.0 + 60.0 * rng.uniform();
    }
    std::set<std::pair<int, int>> prev;
    for (double delta : {0.0, 4.0, 6.0, 8.0, 10.0, 12.0, 30.0}) {
      const ConflictGraph g = build_conflict_graph(fds_from(r), serving, delta);
      const std::set<std::pair<int, int>> cur(g.edges.begin(), g.edges.end());
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      for (const auto& [u, v] : g.edges) {
        CHECK(u < v);
        CHECK(serving[u] != serving[v]);
      }
      prev = cur;
    }
  }
}

TEST_CASE("greedy coloring examples") {
  const ConflictGraph tri = ConflictGraph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto c3 = greedy_coloring(tri, {true, true, true});
  CHECK(colors_used(c3) == 3);
  CHECK(proper(tri, c3));

  const ConflictGraph path = ConflictGraph::from_edges(3, {{0, 1}, {1, 2}});
  const auto c2 = greedy_coloring(path, {true, true, true});
  CHECK(colors_used(c2) == 2);
  CHECK(c2[0] == c2[2]);
  CHECK(c2[1] != c2[0]);
}

TEST_CASE("greedy coloring is proper on random graphs") {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(20));
    const ConflictGraph g = random_graph(n, rng.uniform(), rng);
    CHECK(proper(g, greedy_coloring(g, std::vector<bool>(n, true))));
  }
}

TEST_CASE("greedy is within one color of optimal on small graphs") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const ConflictGraph g = random_graph(n, rng.uniform(), rng);
    const int greedy = colors_used(greedy_coloring(g, std::vector<bool>(n, true)));
    CHECK(greedy <= oracle::chromatic_number(n, g.adjacency()) + 1);
  }
}

TEST_CASE("prb plan from a triangle") {
  const ConflictGraph tri = ConflictGraph::from_edges(4, {{0, 1}, {1, 2}, {0, 2}});
  const PrbPlan plan = color_prbs(tri, 24, 0.5);
  CHECK_FALSE(plan.fallback);
  REQUIRE(plan.sets.size() == 3);
  std::set<int> seen;
  for (const auto& s : plan.sets) {
    CHECK(s.size() == 4);
    for (int p : s) {
      CHECK(p >= 0);
      CHECK(p < 24);
      CHECK(seen.insert(p).second);
    }
  }
  CHECK(plan.common_band.size() == 12);
  CHECK(plan.ue_class[3] == UeClass::kCenter);
  CHECK(plan.allowed_prbs(3).size() == 24);
  for (int u = 0; u < 3; ++u) {
    CHECK(plan.ue_class[u] == UeClass::kEdge);
    CHECK(plan.priority_prbs(u) == plan.sets[plan.color[u]]);
  }
  CHECK(plan.edge_fraction == doctest::Approx(0.5));
}

TEST_CASE("empty conflict graph equals full reuse") {
  const ConflictGraph empty = ConflictGraph::from_edges(5, {});
  CHECK(color_prbs(empty, 30, 0.25) == fr_plan(30, 5));
  const PrbPlan fr = fr_plan(30, 5);
  CHECK(fr.sets.empty());
  CHECK(fr.edge_fraction == 0.0);
  for (int u = 0; u < 5; ++u) CHECK(fr.allowed_prbs(u).size() == 30);
}

TEST_CASE("too many colors falls back to full reuse") {
  std::vector<std::pair<int, int>> k4;
  for (int u = 0; u < 4; ++u)
    for (int v = u + 1; v < 4; ++v) k4.emplace_back(u, v);
  const PrbPlan plan = color_prbs(ConflictGraph::from_edges(4, k4), 40, 0.5, 3);
  CHECK(plan.fallback);
  for (int u = 0; u < 4; ++u) CHECK(plan.allowed_prbs(u).size() == 40);
  CHECK_FALSE(color_prbs(ConflictGraph::from_edges(4, k4), 40, 0.5, 4).fallback);
  // Two reserved PRBs cannot host three colors.
  CHECK(color_prbs(ConflictGraph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}), 8, 0.25).fallback);
}

TEST_CASE("rl update rules") {
  IcicParams p = IcicParams::defaults();
  CHECK(p.delta_db() == 10.0);
  CHECK(p.edge_fraction() == doctest::Approx(0.25));
  CHECK(p.actions.size() == 15);

  p.epsilon = 0.0;
  p.q[7] = 0.9;
  CHECK(rl_update(p, 1.0, 10.0, 1).current == 7);

  p.alpha = 1.0;
  const IcicParams next = rl_update(p, 3.0, 4.0, 2);
  CHECK(next.q[p.current] == 0.75);

  CHECK_THROWS_AS(rl_update(p, -1.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(rl_update(p, NAN, 1.0, 3), std::invalid_argument);
}

TEST_CASE("two-armed bandit converges") {
  IcicParams p;
  p.actions = {{10.0, 0.25}, {10.0, 0.5}};
  p.q = {0.0, 0.0};
  p.current = 1;
  p.epsilon = 0.1;
  p.alpha = 0.5;
  int good = 0;
  for (int step = 0; step < 500; ++step) {
    const double reward = p.current == 0 ? 1.0 : 0.2;
    p = rl_update(p, reward, 1.0, derive_seed(77, static_cast<std::uint64_t>(step)));
    if (step >= 400 && p.current == 0) ++good;
  }
  CHECK(good > 80);
}

TEST_CASE("rl trajectory is deterministic") {
  auto run = [](std::uint64_t seed) {
    IcicParams p = IcicParams::defaults();
    p.epsilon = 0.5;
    std::vector<int> trace;
    for (int k = 0; k < 50; ++k) {
      p = rl_update(p, (k * 37 % 11) / 10.0, 1.0, derive_seed(seed, static_cast<std::uint64_t>(k)));
      trace.push_back(p.current);
    }
    return trace;
  };
  CHECK(run(3) == run(3));
  CHECK(run(3) != run(4));
}

}  // TEST_SUITE
