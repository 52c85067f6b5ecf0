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

#include <cmath>
#include <numeric>

#include "cfran/orchestrator.hpp"
#include "cfran/rng.hpp"
#include "oracles.hpp"

using namespace cfran;

namespace {

// Two cells, one UE each, unit channels: UE 0 hears both cells equally.
std::pair<Topology, Csi> symmetric_pair() {
  Topology t;
  t.rrus = {Rru{{0.0, 0.0}, 1, 0, 30.0}, Rru{{100.0, 0.0}, 1, 0, 30.0}};
  t.ues = {Ue{{50.0, 0.0}, 1, 0}, Ue{{90.0, 0.0}, 1, 1}};
  t.n_subcarriers = t.n_prbs = 4;
  Csi csi;
  csi.h.assign(4, Eigen::MatrixXcd::Constant(2, 2, std::complex<double>(1e-5, 0.0)));
  csi.long_term_gain = Eigen::MatrixXd::Constant(2, 2, 1e-10);
  csi.rru_offsets = {0, 1, 2};
  csi.ue_offsets = {0, 1, 2};
  return {t, csi};
}

Topology one_cell() {
  Topology t;
  t.rrus = {Rru{{0.0, 0.0}, 1, 0, 40.0}};
  t.ues = {Ue{{20.0, 0.0}, 1, 0}, Ue{{40.0, 10.0}, 1, 0}};
  t.bandwidth_hz = 30e6;
  t.n_subcarriers = t.n_prbs = 72;
  return t;
}

SimConfig short_sim(double load_bps, std::uint64_t seed = 1) {
  SimConfig c;
  c.duration = 1000;
  c.near_rt_period = 100;
  c.non_rt_period = 500;
  c.offered_load_bps = load_bps;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("orchestrator") {

TEST_CASE("sinr without interferers is the snr") {
  auto [t, csi] = symmetric_pair();
  Schedule s(2, std::vector<int>(4, -1));
  s[0][2] = 0;
  const double noise = 1e-12;
  const double p_prb = 1000.0 / 4.0;  // 30 dBm over 4 PRBs, mW
  CHECK(sinr_per_prb(t, csi, s, 2, 0, noise) == doctest::Approx(p_prb * 1e-10 / noise).epsilon(1e-13));
  CHECK_THROWS_AS(sinr_per_prb(t, csi, s, 1, 0, noise), std::invalid_argument);
  CHECK_THROWS_AS(sinr_per_prb(t, csi, s, 2, 1, noise), std::invalid_argument);
}

TEST_CASE("equal-power interferer gives 0 dB") {
  auto [t, csi] = symmetric_pair();
  Schedule s(2, std::vector<int>(4, -1));
  s[0][1] = 0;
  s[1][1] = 1;
  CHECK(sinr_per_prb(t, csi, s, 1, 0, 1e-30) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("adding an interferer lowers sinr") {
  Topology t = icic_layout();
  const double noise = SimConfig{}.noise_mw_per_prb(t);
  for (int trial = 0; trial < 50; ++trial) {
    const Csi csi = generate_csi(t, {}, static_cast<std::uint64_t>(trial));
    const int prb = trial % t.n_prbs;
    Schedule s(3, std::vector<int>(t.n_prbs, -1));
    s[0][prb] = 1;
    double prev = sinr_per_prb(t, csi, s, prb, 1, noise);
    for (int c = 1; c < 3; ++c) {
      s[c][prb] = 2 * c;
      const double cur = sinr_per_prb(t, csi, s, prb, 1, noise);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("scheduler examples") {
  const std::vector<int> serving = {0, 1};
  const PrbPlan fr = fr_plan(10, 2);
  const std::vector<double> backlog = {1e6, 1e6};
  const Schedule s = schedule_tti(fr, serving, 2, backlog);
  for (int p = 0; p < 10; ++p) {
    CHECK(s[0][p] == 0);
    CHECK(s[1][p] == 1);
  }

  PrbPlan halves = fr_plan(10, 2);
  halves.sets = {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}};
  halves.common_band.clear();
  halves.ue_class = {UeClass::kEdge, UeClass::kEdge};
  halves.color = {0, 1};
  const Schedule h = schedule_tti(halves, std::vector<int>{0, 0}, 1, backlog);
  for (int p = 0; p < 10; ++p) CHECK(h[0][p] == (p < 5 ? 0 : 1));

  const Schedule idle = schedule_tti(fr, serving, 2, std::vector<double>{0.0, 0.0});
  for (const auto& cell : idle)
    for (int u : cell) CHECK(u == -1);
}

TEST_CASE("scheduler stays inside allowed sets") {
  Rng rng(8);
  const Topology t = icic_layout();
  std::vector<int> serving;
  for (const auto& ue : t.ues) serving.push_back(ue.serving_cell);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < 6; ++u)
      for (int v = u + 1; v < 6; ++v)
        if (serving[u] != serving[v] && rng.uniform() < 0.3) edges.emplace_back(u, v);
    ConflictGraph g = ConflictGraph::from_edges(6, edges);
    g.serving = serving;
    const PrbPlan plan = color_prbs(g, t.n_prbs, 0.25 + 0.25 * rng.uniform(), 6);
    std::vector<double> backlog(6), rate(6);
    for (int u = 0; u < 6; ++u) {
      backlog[u] = rng.uniform() < 0.2 ? 0.0 : 1e6 * rng.uniform();
      rate[u] = 1e3 + 1e5 * rng.uniform();
    }
    const Schedule s = schedule_tti(plan, serving, 3, backlog, rate, static_cast<std::uint64_t>(trial));
    for (int c = 0; c < 3; ++c)
      for (int p = 0; p < t.n_prbs; ++p) {
        const int u = s[c][p];
        if (u < 0) continue;
        CHECK(serving[u] == c);
        CHECK(backlog[u] > 0.0);
        const auto allowed = plan.allowed_prbs(u);
        CHECK(std::find(allowed.begin(), allowed.end(), p) != allowed.end());
      }
  }
}

TEST_CASE("single cell at light load is offered-limited") {
  const SimReport r = run_icic_experiment(short_sim(20e6), one_cell(), IcicMode::kFr);
  for (double x : r.per_ue_throughput) CHECK(x == doctest::Approx(20e6).epsilon(1e-3));
}

TEST_CASE("reports conserve bits and are deterministic") {
  const Topology t = icic_layout();
  for (IcicMode mode : {IcicMode::kFr, IcicMode::kIcic}) {
    const SimReport a = run_icic_experiment(short_sim(120e6, 4), t, mode);
    const SimReport b = run_icic_experiment(short_sim(120e6, 4), t, mode);
    CHECK(a.per_ue_throughput == b.per_ue_throughput);
    CHECK(a.time_series == b.time_series);
    CHECK(a.final_plan == b.final_plan);
    CHECK(a.system_throughput ==
          doctest::Approx(std::accumulate(a.per_ue_throughput.begin(), a.per_ue_throughput.end(), 0.0)));
    for (double x : a.per_ue_throughput) CHECK(x <= 120e6 * (1.0 + 1e-12));
    CHECK(a.time_series.size() == 10);
    CHECK(a.params_trace.size() == (mode == IcicMode::kIcic ? 2u : 0u));
  }
}

TEST_CASE("icic with an empty conflict graph is full reuse") {
  IcicParams never;
  never.actions = {{-1000.0, 0.25}};
  never.q = {0.0};
  never.current = 0;
  never.epsilon = 0.0;
  const Topology t = icic_layout();
  const SimReport fr = run_icic_experiment(short_sim(100e6, 2), t, IcicMode::kFr);
  const SimReport ic = run_icic_experiment(short_sim(100e6, 2), t, IcicMode::kIcic, {}, never);
  CHECK(ic.per_ue_throughput == fr.per_ue_throughput);
  CHECK(ic.final_plan == fr_plan(t.n_prbs, t.n_ues()));
}

TEST_CASE("icic raises edge sinr") {
  // Paired seeds at heavy load; the mean edge-UE SINR gap must clear 3 sigma.
  const Topology t = icic_layout();
  std::vector<double> diff;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SimReport fr = run_icic_experiment(short_sim(150e6, seed), t, IcicMode::kFr);
    const SimReport ic = run_icic_experiment(short_sim(150e6, seed), t, IcicMode::kIcic);
    for (int u : icic_far_ues()) diff.push_back(ic.per_ue_mean_sinr_db[u] - fr.per_ue_mean_sinr_db[u]);
  }
  double m = 0.0, v = 0.0;
  for (double d : diff) m += d;
  m /= diff.size();
  for (double d : diff) v += (d - m) * (d - m);
  const double se = std::sqrt(v / (diff.size() - 1) / diff.size());
  CHECK(m > 3.0 * se);
  CHECK(m > 0.0);
}

TEST_CASE("rayleigh ergodic se") {
  Topology t;
  t.rrus = {Rru{{0.0, 0.0}, 1, 0}};
  t.ues = {Ue{{30.0, 0.0}, 1, 0}};
  t.n_subcarriers = t.n_prbs = 1;
  FadingProfile flat;
  flat.n_taps = 1;
  const double noise = reference_noise_var(t, 0.0);
  CHECK(noise == doctest::Approx(std::pow(10.0, -path_loss_db(30.0, t.carrier_hz) / 10.0)).epsilon(1e-12));
  const SeStatistics st = run_se_experiment(t, 20000, noise, 5, flat, 1);
  const double want = oracle::rayleigh_ergodic_se(1.0);
  CHECK(want == doctest::Approx(0.8600).epsilon(1e-3));
  CHECK(std::abs(st.joint_mean - want) < 0.02);
}

TEST_CASE("joint processing dominates per drop") {
  Topology t = se_layout();
  t.n_subcarriers = t.n_prbs = 12;
  const SeStatistics st = run_se_experiment(t, 10, reference_noise_var(t, 20.0), 3, {}, 2);
  for (std::size_t d = 0; d < st.joint.size(); ++d) {
    CHECK(st.joint[d] >= st.best_single[d]);
    CHECK(st.joint[d] >= st.small_cell[d]);
  }
  CHECK(st.joint_p10 <= st.joint_p50);
  CHECK(st.joint_p50 <= st.joint_p90);
}

TEST_CASE("more streams than antennas is rejected") {
  Topology t;
  t.rrus = {Rru{{0.0, 0.0}, 2, 0}};
  t.ues = {Ue{{30.0, 0.0}, 2, 0}, Ue{{40.0, 0.0}, 1, 0}};
  t.n_subcarriers = t.n_prbs = 1;
  CHECK_THROWS_AS(run_se_experiment(t, 1, 1.0, 1), std::invalid_argument);
}

TEST_CASE("sim config invariants") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  c.non_rt_period = 50;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SimConfig{};
  c.duration = 500;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SimConfig{};
  c.link_adaptation_cap = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(SimConfig{}.link_adaptation_cap == doctest::Approx(5.34));
}

TEST_CASE("default layouts") {
  const Topology icic = icic_layout();
  CHECK_NOTHROW(icic.validate());
  CHECK(icic.n_rrus() == 3);
  CHECK(icic.n_ues() == 6);
  for (int c = 0; c < 3; ++c)
    for (int d = c + 1; d < 3; ++d)
      CHECK((icic.rrus[c].position - icic.rrus[d].position).norm() == doctest::Approx(200.0));
  for (int u : {0, 2, 4})
    CHECK((icic.ues[u].position - icic.rrus[icic.ues[u].serving_cell].position).norm() == doctest::Approx(20.0));

  const Topology se = se_layout();
  CHECK_NOTHROW(se.validate());
  CHECK(se.total_rru_antennas() == 48);
  CHECK(se.total_ue_antennas() == 48);
}

}  // TEST_SUITE
