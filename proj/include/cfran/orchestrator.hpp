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
#include <string>
#include <vector>

#include "cfran/cellfree.hpp"
#include "cfran/channel.hpp"
#include "cfran/icic.hpp"

namespace cfran {

struct SimConfig {
  double tti_s = 1e-3;
  int near_rt_period = 100;   // TTIs
  int non_rt_period = 1000;   // TTIs
  int duration = 3000;        // TTIs
  double offered_load_bps = 150e6;  // per UE
  double link_adaptation_cap = 6 * 0.89;  // bps/Hz
  double noise_figure_db = 7.0;
  double noise_density_dbm_hz = -174.0;
  std::uint64_t seed = 1;

  /// Noise power on one PRB, mW.
  double noise_mw_per_prb(const Topology& topology) const;
  void validate() const;
};

enum class IcicMode { kIcic, kFr };
const char* to_string(IcicMode mode);

/// PRB -> UE per cell (-1 when unused).
using Schedule = std::vector<std::vector<int>>;

/// Downlink SINR of `ue` on `prb`: serving power over co-channel cells'
/// power plus noise. RRU power is split evenly over PRBs and transmit
/// antennas; the UE combines energy over its antennas. Throws if `ue` is not
/// scheduled on `prb`.
double sinr_per_prb(const Topology& topology, const Csi& csi, const Schedule& scheduled,
                    int prb, int ue, double noise_mw_per_prb);

/// Per cell, round-robin over backlogged UEs restricted to each UE's allowed
/// PRBs. With `bits_per_prb` given, a UE stops competing once the PRBs it has
/// received are expected to clear its backlog. `rotation` shifts the
/// round-robin start so successive TTIs take turns.
Schedule schedule_tti(const PrbPlan& plan, std::span<const int> serving, int n_cells,
                      std::span<const double> backlog_bits,
                      std::span<const double> bits_per_prb = {}, std::uint64_t rotation = 0);

struct SimReport {
  IcicMode mode = IcicMode::kFr;
  double offered_load_bps = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> per_ue_throughput;  // bps
  double system_throughput = 0.0;         // bps
  std::vector<double> time_series;        // system bps per near-RT window
  std::vector<IcicParams> params_trace;   // one per non-RT window (ICIC only)
  std::vector<double> per_ue_mean_sinr_db;  // over PRBs the UE was scheduled on
  PrbPlan final_plan;
  Fds final_fds;
};

/// Three-timescale loop. Every TTI: fading draw, RSRP samples into the
/// knowledge graph, arrivals, scheduling, SINR to rate with the link
/// adaptation cap, backlog service. Every near-RT period: FDS, conflict
/// graph and coloring (ICIC) or full reuse (FR). Every non-RT period: RL
/// update (ICIC). Pure in its arguments.
SimReport run_icic_experiment(const SimConfig& config, const Topology& topology, IcicMode mode,
                              const FadingProfile& fading = {},
                              const IcicParams& initial = IcicParams::defaults(),
                              int max_colors = 3);

struct SeStatistics {
  std::vector<double> joint;        // per drop, bps/Hz
  std::vector<double> best_single;  // best single-RRU LMMSE over all streams
  std::vector<double> small_cell;   // each RRU detects only its own UEs
  double joint_mean = 0.0;
  double joint_p10 = 0.0;
  double joint_p50 = 0.0;
  double joint_p90 = 0.0;
  double best_single_mean = 0.0;
  double small_cell_mean = 0.0;
};

/// Uplink SE per drop with unit per-stream power: joint LMMSE over every RRU
/// antenna versus single-RRU processing. Evaluated on up to `max_tones`
/// evenly spaced subcarriers per drop. Throws when streams exceed BS
/// antennas.
SeStatistics run_se_experiment(const Topology& topology, int n_drops, double noise_var,
                               std::uint64_t seed, const FadingProfile& fading = {},
                               int max_tones = 8);

/// Noise variance giving `snr_db` for the mean serving-link path gain.
double reference_noise_var(const Topology& topology, double snr_db);

// Default layouts -----------------------------------------------------------

/// Three RRUs on a 200 m equilateral triangle. Each cell has a UE 20 m from
/// its RRU and a UE at the cell border, 110 m out toward the common corner
/// of the three cells. UEs 0, 2, 4 are the close ones. 30 MHz, 72 PRBs.
Topology icic_layout();

/// Indices of the cell-border UEs of icic_layout().
std::vector<int> icic_far_ues();

/// 12 four-antenna RRUs on a 4 x 3 grid (50 m pitch), one four-antenna UE
/// 10 m from each; 100 MHz, 273 PRBs.
Topology se_layout();

}  // namespace cfran
