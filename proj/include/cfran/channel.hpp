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

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace cfran {

struct Rru {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  int n_antennas = 1;
  int edu_id = 0;
  double tx_power_dbm = 30.0;
};

struct Ue {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  int n_antennas = 1;
  int serving_cell = 0;
  double tx_power_dbm = 23.0;
};

/// Deployment geometry plus the carrier and PRB grid.
///
/// Each RRU is one cell. Antennas are numbered contiguously: RRU r owns rows
/// [rru_antenna_offset(r), rru_antenna_offset(r) + n_antennas) of every
/// per-subcarrier channel matrix, and likewise for UE columns.
struct Topology {
  std::vector<Rru> rrus;
  std::vector<Ue> ues;
  double carrier_hz = 4.9e9;
  double bandwidth_hz = 100e6;
  int n_subcarriers = 273;
  int n_prbs = 273;

  int n_rrus() const { return static_cast<int>(rrus.size()); }
  int n_ues() const { return static_cast<int>(ues.size()); }
  int total_rru_antennas() const;
  int total_ue_antennas() const;
  int rru_antenna_offset(int rru) const;
  int ue_antenna_offset(int ue) const;
  int subcarriers_per_prb() const { return n_subcarriers / n_prbs; }
  double prb_bandwidth_hz() const { return bandwidth_hz / n_prbs; }
  /// Subcarrier used as the PRB's representative tone.
  int prb_tone(int prb) const { return prb * subcarriers_per_prb() + subcarriers_per_prb() / 2; }

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

/// Exponential power-delay profile for the tapped-delay-line fading model.
struct FadingProfile {
  int n_taps = 6;
  double delay_decay = 0.5;
  std::uint64_t seed = 0;

  /// Tap powers exp(-decay * l), normalized to sum to one.
  Eigen::VectorXd tap_powers() const;
};

/// Channel state for one realization.
///
/// h[s] is the (total RRU antennas x total UE antennas) uplink matrix on
/// subcarrier s, linear amplitude. long_term_gain(r, u) is the path gain of
/// the (RRU r, UE u) pair.
struct Csi {
  std::vector<Eigen::MatrixXcd> h;
  Eigen::MatrixXd long_term_gain;
  std::vector<int> rru_offsets;  // n_rrus + 1 entries
  std::vector<int> ue_offsets;   // n_ues + 1 entries

  int n_subcarriers() const { return static_cast<int>(h.size()); }
  int n_rrus() const { return static_cast<int>(long_term_gain.rows()); }
  int n_ues() const { return static_cast<int>(long_term_gain.cols()); }

  auto block(int subcarrier, int rru, int ue) const {
    return h[subcarrier].block(rru_offsets[rru], ue_offsets[ue],
                               rru_offsets[rru + 1] - rru_offsets[rru],
                               ue_offsets[ue + 1] - ue_offsets[ue]);
  }

  /// Mean |h|^2 per antenna pair of (rru, ue) on one subcarrier.
  double pair_power(int subcarrier, int rru, int ue) const;
};

/// Close-in path loss, PL = 32.4 + 20 log10(f_GHz) + 31.9 log10(d).
/// Throws std::domain_error below 1 m.
double path_loss_db(double distance_m, double carrier_hz);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Draws a frequency-selective realization. Pure in (topology, fading, seed).
/// Pair distances below 1 m are evaluated at 1 m.
Csi generate_csi(const Topology& topology, const FadingProfile& fading,
                 std::uint64_t seed);

/// Long-term RSRP: RRU transmit power plus 10 log10 of the pair path gain.
double rsrp_dbm(const Csi& csi, const Topology& topology, int cell, int ue);

/// RSRP measured on this realization: wideband mean channel power instead of
/// the long-term gain. Fluctuates around rsrp_dbm with the fading.
double measured_rsrp_dbm(const Csi& csi, const Topology& topology, int cell,
                         int ue);

}  // namespace cfran
