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

#include "cfran/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cfran/rng.hpp"

namespace cfran {

int Topology::total_rru_antennas() const {
  int n = 0;
  for (const auto& r : rrus) n += r.n_antennas;
  return n;
}

int Topology::total_ue_antennas() const {
  int n = 0;
  for (const auto& u : ues) n += u.n_antennas;
  return n;
}

int Topology::rru_antenna_offset(int rru) const {
  int n = 0;
  for (int r = 0; r < rru; ++r) n += rrus[r].n_antennas;
  return n;
}

int Topology::ue_antenna_offset(int ue) const {
  int n = 0;
  for (int u = 0; u < ue; ++u) n += ues[u].n_antennas;
  return n;
}

void Topology::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("invalid topology: " + what);
  };
  if (rrus.empty()) fail("no RRUs");
  if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) fail("carrier must be positive");
  if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz)) fail("bandwidth must be positive");
  if (n_prbs < 1) fail("n_prbs must be >= 1");
  if (n_subcarriers < n_prbs || n_subcarriers % n_prbs != 0)
    fail("n_subcarriers must be a multiple of n_prbs");
  for (std::size_t r = 0; r < rrus.size(); ++r) {
    if (!rrus[r].position.allFinite()) fail("RRU " + std::to_string(r) + " position not finite");
    if (rrus[r].n_antennas < 1) fail("RRU " + std::to_string(r) + " has no antennas");
    if (!std::isfinite(rrus[r].tx_power_dbm)) fail("RRU tx power not finite");
  }
  for (std::size_t u = 0; u < ues.size(); ++u) {
    if (!ues[u].position.allFinite()) fail("UE " + std::to_string(u) + " position not finite");
    if (ues[u].n_antennas < 1) fail("UE " + std::to_string(u) + " has no antennas");
    if (ues[u].serving_cell < 0 || ues[u].serving_cell >= n_rrus())
      fail("UE " + std::to_string(u) + " serving cell out of range");
    if (!std::isfinite(ues[u].tx_power_dbm)) fail("UE tx power not finite");
  }
}

Eigen::VectorXd FadingProfile::tap_powers() const {
  if (n_taps < 1) throw std::invalid_argument("fading profile needs at least one tap");
  Eigen::VectorXd p(n_taps);
  for (int l = 0; l < n_taps; ++l) p(l) = std::exp(-delay_decay * l);
  return p / p.sum();
}

double Csi::pair_power(int subcarrier, int rru, int ue) const {
  return block(subcarrier, rru, ue).squaredNorm() /
         static_cast<double>(block(subcarrier, rru, ue).size());
}

double path_loss_db(double distance_m, double carrier_hz) {
  if (!(distance_m >= 1.0))
    throw std::domain_error("path loss model is valid from 1 m, got " +
                            std::to_string(distance_m));
  return 32.4 + 20.0 * std::log10(carrier_hz / 1e9) + 31.9 * std::log10(distance_m);
}

Csi generate_csi(const Topology& topology, const FadingProfile& fading,
                 std::uint64_t seed) {
  topology.validate();
  const Eigen::VectorXd tap_power = fading.tap_powers();
  const int n_sc = topology.n_subcarriers;
  const int n_taps = fading.n_taps;
  const int m_total = topology.total_rru_antennas();
  const int k_total = topology.total_ue_antennas();

  Csi csi;
  csi.h.assign(n_sc, Eigen::MatrixXcd::Zero(m_total, k_total));
  csi.long_term_gain.resize(topology.n_rrus(), topology.n_ues());
  csi.rru_offsets.resize(topology.n_rrus() + 1);
  csi.ue_offsets.resize(topology.n_ues() + 1);
  for (int r = 0; r <= topology.n_rrus(); ++r) csi.rru_offsets[r] = topology.rru_antenna_offset(r);
  for (int u = 0; u <= topology.n_ues(); ++u) csi.ue_offsets[u] = topology.ue_antenna_offset(u);

  // twiddle(l, s) = exp(-j 2 pi l s / N): tap delays in units of 1/bandwidth.
  Eigen::MatrixXcd twiddle(n_taps, n_sc);
  for (int l = 0; l < n_taps; ++l)
    for (int s = 0; s < n_sc; ++s)
      twiddle(l, s) = std::polar(1.0, -2.0 * std::numbers::pi * l * s / n_sc);

  Rng rng(derive_seed(fading.seed, seed));
  Eigen::RowVectorXcd taps(n_taps);
  for (int r = 0; r < topology.n_rrus(); ++r) {
    for (int u = 0; u < topology.n_ues(); ++u) {
      const double d = std::max(
          1.0, (topology.rrus[r].position - topology.ues[u].position).norm());
      const double gain = db_to_linear(-path_loss_db(d, topology.carrier_hz));
      csi.long_term_gain(r, u) = gain;
      for (int m = csi.rru_offsets[r]; m < csi.rru_offsets[r + 1]; ++m) {
        for (int k = csi.ue_offsets[u]; k < csi.ue_offsets[u + 1]; ++k) {
          for (int l = 0; l < n_taps; ++l) taps(l) = rng.complex_normal(gain * tap_power(l));
          const Eigen::RowVectorXcd response = taps * twiddle;
          for (int s = 0; s < n_sc; ++s) csi.h[s](m, k) = response(s);
        }
      }
    }
  }
  return csi;
}

namespace {
void check_pair(const Csi& csi, const Topology& topology, int cell, int ue) {
  if (cell < 0 || cell >= topology.n_rrus() || cell >= csi.n_rrus())
    throw std::out_of_range("cell index " + std::to_string(cell) + " out of range");
  if (ue < 0 || ue >= topology.n_ues() || ue >= csi.n_ues())
    throw std::out_of_range("UE index " + std::to_string(ue) + " out of range");
}
}  // namespace

double rsrp_dbm(const Csi& csi, const Topology& topology, int cell, int ue) {
  check_pair(csi, topology, cell, ue);
  return topology.rrus[cell].tx_power_dbm + linear_to_db(csi.long_term_gain(cell, ue));
}

double measured_rsrp_dbm(const Csi& csi, const Topology& topology, int cell,
                         int ue) {
  check_pair(csi, topology, cell, ue);
  double p = 0.0;
  for (int s = 0; s < csi.n_subcarriers(); ++s) p += csi.pair_power(s, cell, ue);
  p /= csi.n_subcarriers();
  return topology.rrus[cell].tx_power_dbm + linear_to_db(p);
}

}  // namespace cfran
