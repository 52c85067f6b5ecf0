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

#include <Eigen/Dense>

namespace cfran {

/// Allowed THz carrier window; WR2.2 waveguide band by default.
struct BandWindow {
  double low_hz = 330e9;
  double high_hz = 500e9;
};

/// Frequencies along the fiber-THz-fiber chain. The THz carrier is the
/// heterodyne beat of the optical signal and the transmit LO; the receiver
/// down-converts it to f_if and modulates that onto the receive optical
/// carrier f_rx_lo, keeping the upper sideband.
struct FrequencyPlan {
  double f_tx_signal = 0.0;
  double f_tx_lo = 0.0;
  double f_thz = 0.0;
  double f_if = 0.0;
  double f_rx_lo = 0.0;
  double f_rx_signal = 0.0;
  bool out_of_band = false;
};

/// Throws std::invalid_argument unless f_tx_signal > f_tx_lo > 0,
/// f_rx_lo > 0 and 0 < f_if < f_thz.
FrequencyPlan frequency_plan(double f_tx_signal, double f_tx_lo, double f_rx_lo,
                             double f_if = 20e9, BandWindow window = {});

double line_rate(double baud, int polarizations, int bits_per_symbol_per_pol);
double net_rate(double line_rate_bps, double total_overhead);
/// Overhead fraction that turns `line_rate_bps` into `net_rate_bps`.
double backsolve_overhead(double line_rate_bps, double net_rate_bps);

struct LinkConfig {
  double baud = 31.379e9;
  int polarizations = 2;
  int bits_per_symbol_per_pol = 2;  // QPSK
  Eigen::Matrix2cd mimo_channel = Eigen::Matrix2cd::Identity();
  double snr_db = 4.0;  // Eb/N0 per bit; +inf for a noiseless link
  double fec_threshold = 1.56e-2;
  double fec_overhead = 0.15;
  double total_overhead = 0.15;  // everything between line and net rate
};

struct LinkReport {
  double ber = 0.0;
  bool pre_fec_ok = false;
  double line_rate = 0.0;
  double net_rate = 0.0;
  std::uint64_t n_bits = 0;
  std::uint64_t n_errors = 0;
};

/// Gray-mapped QPSK on both polarizations, mixed by the 2x2 channel, AWGN,
/// zero-forcing with the known channel and hard decisions. Needs at least
/// 10^4 symbols; throws on a singular channel. Deterministic per seed, and
/// the noise draws are shared across SNRs for the same seed.
LinkReport simulate_ber(const LinkConfig& config, std::int64_t n_symbols, std::uint64_t seed);

/// Gaussian tail probability.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Analytic Gray QPSK bit error rate, Q(sqrt(2 Eb/N0)).
inline double qpsk_ber(double ebn0_db) {
  return q_function(std::sqrt(2.0 * std::pow(10.0, ebn0_db / 10.0)));
}

}  // namespace cfran
