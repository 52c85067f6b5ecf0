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

#include "cfran/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cfran/rng.hpp"

namespace cfran {

double SimConfig::noise_mw_per_prb(const Topology& topology) const {
  return db_to_linear(noise_density_dbm_hz + noise_figure_db +
                      linear_to_db(topology.prb_bandwidth_hz()));
}

void SimConfig::validate() const {
  if (!(tti_s > 0.0)) throw std::invalid_argument("sim: tti must be positive");
  if (near_rt_period < 1) throw std::invalid_argument("sim: near_rt_period must be >= 1");
  if (!(near_rt_period <= non_rt_period && non_rt_period <= duration))
    throw std::invalid_argument("sim: need near_rt_period <= non_rt_period <= duration");
  if (!(link_adaptation_cap > 0.0)) throw std::invalid_argument("sim: link adaptation cap must be positive");
  if (!(offered_load_bps >= 0.0) || !std::isfinite(offered_load_bps))
    throw std::invalid_argument("sim: offered load must be finite and non-negative");
}

const char* to_string(IcicMode mode) { return mode == IcicMode::kIcic ? "icic" : "fr"; }

namespace {

// Received power per PRB from `cell` at `ue` on `prb`, mW.
double received_mw(const Topology& topology, const Csi& csi, int cell, int ue, int prb) {
  const double p_prb = db_to_linear(topology.rrus[cell].tx_power_dbm) / topology.n_prbs;
  const auto h = csi.block(topology.prb_tone(prb), cell, ue);
  return p_prb * h.squaredNorm() / static_cast<double>(h.rows());
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double sinr_per_prb(const Topology& topology, const Csi& csi, const Schedule& scheduled,
                    int prb, int ue, double noise_mw_per_prb) {
  if (ue < 0 || ue >= topology.n_ues()) throw std::out_of_range("sinr_per_prb: UE out of range");
  if (prb < 0 || prb >= topology.n_prbs) throw std::out_of_range("sinr_per_prb: PRB out of range");
  const int serving = topology.ues[ue].serving_cell;
  if (scheduled.at(serving).at(prb) != ue)
    throw std::invalid_argument("sinr_per_prb: UE " + std::to_string(ue) + " is not scheduled on PRB " +
                                std::to_string(prb));
  double interference = 0.0;
  for (int c = 0; c < topology.n_rrus(); ++c)
    if (c != serving && scheduled[c][prb] >= 0)
      interference += received_mw(topology, csi, c, ue, prb);
  return received_mw(topology, csi, serving, ue, prb) / (interference + noise_mw_per_prb);
}

Schedule schedule_tti(const PrbPlan& plan, std::span<const int> serving, int n_cells,
                      std::span<const double> backlog_bits, std::span<const double> bits_per_prb,
                      std::uint64_t rotation) {
  const int n_ues = static_cast<int>(serving.size());
  if (static_cast<int>(backlog_bits.size()) != n_ues)
    throw std::invalid_argument("schedule_tti: backlog size does not match UE count");
  if (!bits_per_prb.empty() && static_cast<int>(bits_per_prb.size()) != n_ues)
    throw std::invalid_argument("schedule_tti: rate estimate size does not match UE count");

  std::vector<std::vector<bool>> allowed(n_ues, std::vector<bool>(plan.n_prbs, false));
  std::vector<std::vector<bool>> priority(n_ues, std::vector<bool>(plan.n_prbs, false));
  for (int u = 0; u < n_ues; ++u) {
    for (int p : plan.allowed_prbs(u)) allowed[u][p] = true;
    for (int p : plan.priority_prbs(u)) priority[u][p] = true;
  }

  Schedule schedule(n_cells, std::vector<int>(plan.n_prbs, -1));
  for (int c = 0; c < n_cells; ++c) {
    std::vector<int> ues;
    for (int u = 0; u < n_ues; ++u)
      if (serving[u] == c && backlog_bits[u] > 0.0) ues.push_back(u);
    if (ues.empty()) continue;
    const std::size_t n = ues.size();
    std::rotate(ues.begin(), ues.begin() + static_cast<std::ptrdiff_t>(rotation % n), ues.end());

    std::vector<double> remaining(n);
    for (std::size_t i = 0; i < n; ++i) remaining[i] = backlog_bits[ues[i]];
    // First pass on priority sets, second pass hands idle PRBs to whoever
    // may still use them.
    for (const auto* mask : {&priority, &allowed}) {
      std::size_t next = 0;
      for (int p = 0; p < plan.n_prbs; ++p) {
        if (schedule[c][p] >= 0) continue;
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t i = (next + k) % n;
          if (remaining[i] <= 0.0 || !(*mask)[ues[i]][p]) continue;
          schedule[c][p] = ues[i];
          if (!bits_per_prb.empty()) remaining[i] -= bits_per_prb[ues[i]];
          next = (i + 1) % n;
          break;
        }
      }
    }
  }
  return schedule;
}

SimReport run_icic_experiment(const SimConfig& config, const Topology& topology, IcicMode mode,
                              const FadingProfile& fading, const IcicParams& initial,
                              int max_colors) {
  config.validate();
  topology.validate();
  initial.validate();
  const int n_ues = topology.n_ues();
  const int n_cells = topology.n_rrus();
  const int n_prbs = topology.n_prbs;
  const double prb_hz = topology.prb_bandwidth_hz();
  const double noise = config.noise_mw_per_prb(topology);
  const double arrival_bits = config.offered_load_bps * config.tti_s;

  std::vector<int> serving(n_ues);
  for (int u = 0; u < n_ues; ++u) serving[u] = topology.ues[u].serving_cell;

  KnowledgeGraph graph = KnowledgeGraph::from_topology(topology);
  IcicParams params = initial;
  PrbPlan plan = fr_plan(n_prbs, n_ues);

  std::vector<double> backlog(n_ues, 0.0);
  std::vector<double> delivered(n_ues, 0.0);
  std::vector<double> rate_estimate(n_ues, config.link_adaptation_cap * prb_hz * config.tti_s);
  std::vector<double> sinr_db_sum(n_ues, 0.0);
  std::vector<long> sinr_count(n_ues, 0);
  double near_window_bits = 0.0;
  int near_window_len = 0;
  double non_rt_delivered = 0.0;
  double non_rt_offered = 0.0;

  SimReport report;
  report.mode = mode;
  report.offered_load_bps = config.offered_load_bps;
  report.seed = config.seed;

  for (int t = 0; t < config.duration; ++t) {
    const Csi csi = generate_csi(topology, fading, derive_seed(config.seed, 0x435349, t));
    for (int u = 0; u < n_ues; ++u)
      for (int c = 0; c < n_cells; ++c)
        graph.record_rsrp(u, c, t, measured_rsrp_dbm(csi, topology, c, u));

    if (t % config.near_rt_period == 0) {
      if (mode == IcicMode::kIcic) {
        report.final_fds = extract_fds(graph, std::max(0, t - config.near_rt_period + 1), t + 1);
        const ConflictGraph conflicts =
            build_conflict_graph(report.final_fds, serving, params.delta_db());
        plan = color_prbs(conflicts, n_prbs, params.edge_fraction(), max_colors);
      } else {
        plan = fr_plan(n_prbs, n_ues);
      }
      graph.prune_before(t - config.near_rt_period);
    }

    for (int u = 0; u < n_ues; ++u) backlog[u] += arrival_bits;
    non_rt_offered += arrival_bits * n_ues;

    const Schedule schedule =
        schedule_tti(plan, serving, n_cells, backlog, rate_estimate, static_cast<std::uint64_t>(t));
    std::vector<double> capacity(n_ues, 0.0);
    std::vector<int> n_assigned(n_ues, 0);
    for (int c = 0; c < n_cells; ++c)
      for (int p = 0; p < n_prbs; ++p) {
        const int u = schedule[c][p];
        if (u < 0) continue;
        const double sinr = sinr_per_prb(topology, csi, schedule, p, u, noise);
        capacity[u] += prb_hz * config.tti_s *
                       std::min(std::log2(1.0 + sinr), config.link_adaptation_cap);
        ++n_assigned[u];
        sinr_db_sum[u] += linear_to_db(sinr);
        ++sinr_count[u];
      }

    double tti_bits = 0.0;
    for (int u = 0; u < n_ues; ++u) {
      const double served = std::min(backlog[u], capacity[u]);
      backlog[u] -= served;
      delivered[u] += served;
      tti_bits += served;
      if (n_assigned[u] > 0)
        rate_estimate[u] = 0.5 * rate_estimate[u] + 0.5 * capacity[u] / n_assigned[u];
    }
    near_window_bits += tti_bits;
    ++near_window_len;
    non_rt_delivered += tti_bits;

    if ((t + 1) % config.near_rt_period == 0 || t + 1 == config.duration) {
      report.time_series.push_back(near_window_bits / (near_window_len * config.tti_s));
      near_window_bits = 0.0;
      near_window_len = 0;
    }
    if ((t + 1) % config.non_rt_period == 0 && mode == IcicMode::kIcic) {
      const auto window = static_cast<std::uint64_t>(t / config.non_rt_period);
      params = rl_update(params, non_rt_delivered, non_rt_offered,
                         derive_seed(config.seed, 0x524c, window));
      report.params_trace.push_back(params);
      non_rt_delivered = 0.0;
      non_rt_offered = 0.0;
    }
  }

  const double seconds = config.duration * config.tti_s;
  report.per_ue_throughput.resize(n_ues);
  report.per_ue_mean_sinr_db.resize(n_ues);
  for (int u = 0; u < n_ues; ++u) {
    report.per_ue_throughput[u] = delivered[u] / seconds;
    report.system_throughput += report.per_ue_throughput[u];
    report.per_ue_mean_sinr_db[u] = sinr_count[u] > 0 ? sinr_db_sum[u] / sinr_count[u] : 0.0;
  }
  report.final_plan = plan;
  return report;
}

SeStatistics run_se_experiment(const Topology& topology, int n_drops, double noise_var,
                               std::uint64_t seed, const FadingProfile& fading, int max_tones) {
  topology.validate();
  if (n_drops < 1) throw std::invalid_argument("se experiment: n_drops must be >= 1");
  if (max_tones < 1) throw std::invalid_argument("se experiment: max_tones must be >= 1");
  const int m_total = topology.total_rru_antennas();
  const int k_total = topology.total_ue_antennas();
  if (k_total > m_total)
    throw std::invalid_argument("se experiment: " + std::to_string(k_total) + " streams exceed " +
                                std::to_string(m_total) + " BS antennas");

  const int n_sc = topology.n_subcarriers;
  const int n_tones = std::min(max_tones, n_sc);
  std::vector<int> tones(n_tones);
  for (int i = 0; i < n_tones; ++i) tones[i] = i * n_sc / n_tones + n_sc / n_tones / 2;

  SeStatistics stats;
  for (int d = 0; d < n_drops; ++d) {
    const Csi csi = generate_csi(topology, fading, derive_seed(seed, 0x5345, d));
    double joint = 0.0;
    double best_single = 0.0;
    double small_cell = 0.0;
    for (int s : tones) {
      const Eigen::MatrixXcd& h = csi.h[s];
      joint += sum_se(lmmse_sinr(h, noise_var));
      double best = 0.0;
      for (int r = 0; r < topology.n_rrus(); ++r) {
        const int rows = csi.rru_offsets[r + 1] - csi.rru_offsets[r];
        const Eigen::VectorXd sinr = lmmse_sinr(h.middleRows(csi.rru_offsets[r], rows), noise_var);
        best = std::max(best, sum_se(sinr));
        for (int u = 0; u < topology.n_ues(); ++u) {
          if (topology.ues[u].serving_cell != r) continue;
          const int width = csi.ue_offsets[u + 1] - csi.ue_offsets[u];
          small_cell += sum_se(sinr.segment(csi.ue_offsets[u], width));
        }
      }
      best_single += best;
    }
    stats.joint.push_back(joint / n_tones);
    stats.best_single.push_back(best_single / n_tones);
    stats.small_cell.push_back(small_cell / n_tones);
  }
  stats.joint_mean = mean(stats.joint);
  stats.joint_p10 = percentile(stats.joint, 0.1);
  stats.joint_p50 = percentile(stats.joint, 0.5);
  stats.joint_p90 = percentile(stats.joint, 0.9);
  stats.best_single_mean = mean(stats.best_single);
  stats.small_cell_mean = mean(stats.small_cell);
  return stats;
}

double reference_noise_var(const Topology& topology, double snr_db) {
  topology.validate();
  if (topology.ues.empty()) throw std::invalid_argument("reference_noise_var: no UEs");
  double gain = 0.0;
  for (const auto& ue : topology.ues) {
    const double d = std::max(1.0, (topology.rrus[ue.serving_cell].position - ue.position).norm());
    gain += db_to_linear(-path_loss_db(d, topology.carrier_hz));
  }
  gain /= topology.n_ues();
  return gain / db_to_linear(snr_db);
}

Topology icic_layout() {
  Topology t;
  t.carrier_hz = 4.9e9;
  t.bandwidth_hz = 30e6;
  t.n_prbs = 72;
  t.n_subcarriers = 72;
  const double side = 200.0;
  const std::vector<Eigen::Vector2d> sites = {
      {0.0, 0.0}, {side, 0.0}, {side / 2.0, side * std::sqrt(3.0) / 2.0}};
  const Eigen::Vector2d corner = (sites[0] + sites[1] + sites[2]) / 3.0;
  for (int c = 0; c < 3; ++c) {
    t.rrus.push_back(Rru{sites[c], 1, 0, 40.0});
    const Eigen::Vector2d inward = (corner - sites[c]).normalized();
    t.ues.push_back(Ue{sites[c] - 20.0 * inward, 1, c, 23.0});
    t.ues.push_back(Ue{sites[c] + 110.0 * inward, 1, c, 23.0});
  }
  return t;
}

std::vector<int> icic_far_ues() { return {1, 3, 5}; }

Topology se_layout() {
  Topology t;
  t.carrier_hz = 4.9e9;
  t.bandwidth_hz = 100e6;
  t.n_prbs = 273;
  t.n_subcarriers = 273;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 4; ++i) t.rrus.push_back(Rru{{50.0 * i, 50.0 * j}, 4, 0, 30.0});
  for (int r = 0; r < 12; ++r) {
    const double angle = 2.4 * r;
    const Eigen::Vector2d offset(10.0 * std::cos(angle), 10.0 * std::sin(angle));
    t.ues.push_back(Ue{t.rrus[r].position + offset, 4, r, 23.0});
  }
  return t;
}

}  // namespace cfran
