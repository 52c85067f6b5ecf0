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

#include "cfran/thzlink.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "cfran/rng.hpp"

namespace cfran {

FrequencyPlan frequency_plan(double f_tx_signal, double f_tx_lo, double f_rx_lo, double f_if,
                             BandWindow window) {
  if (!(f_tx_lo > 0.0) || !(f_tx_signal > f_tx_lo))
    throw std::invalid_argument("frequency_plan: need f_tx_signal > f_tx_lo > 0");
  if (!(f_rx_lo > 0.0)) throw std::invalid_argument("frequency_plan: f_rx_lo must be positive");
  FrequencyPlan plan;
  plan.f_tx_signal = f_tx_signal;
  plan.f_tx_lo = f_tx_lo;
  plan.f_thz = f_tx_signal - f_tx_lo;
  if (!(f_if > 0.0 && f_if < plan.f_thz))
    throw std::invalid_argument("frequency_plan: IF must lie between 0 and the THz carrier");
  plan.f_if = f_if;
  plan.f_rx_lo = f_rx_lo;
  plan.f_rx_signal = f_rx_lo + f_if;
  plan.out_of_band = plan.f_thz < window.low_hz || plan.f_thz > window.high_hz;
  return plan;
}

double line_rate(double baud, int polarizations, int bits_per_symbol_per_pol) {
  if (!(baud > 0.0) || polarizations < 1 || bits_per_symbol_per_pol < 1)
    throw std::invalid_argument("line_rate: all inputs must be positive");
  return baud * polarizations * bits_per_symbol_per_pol;
}

double net_rate(double line_rate_bps, double total_overhead) {
  if (!(total_overhead >= 0.0 && total_overhead < 1.0))
    throw std::invalid_argument("net_rate: overhead must lie in [0, 1)");
  return line_rate_bps * (1.0 - total_overhead);
}

double backsolve_overhead(double line_rate_bps, double net_rate_bps) {
  if (!(line_rate_bps > 0.0) || !(net_rate_bps > 0.0) || net_rate_bps > line_rate_bps)
    throw std::invalid_argument("backsolve_overhead: need 0 < net <= line");
  return 1.0 - net_rate_bps / line_rate_bps;
}

LinkReport simulate_ber(const LinkConfig& config, std::int64_t n_symbols, std::uint64_t seed) {
  if (n_symbols < 10000) throw std::invalid_argument("simulate_ber: need at least 10^4 symbols");
  if (config.polarizations != 2 || config.bits_per_symbol_per_pol != 2)
    throw std::invalid_argument("simulate_ber: only dual-polarization QPSK is modeled");
  const Eigen::Matrix2cd& h = config.mimo_channel;
  const double scale = h.cwiseAbs2().sum();
  if (!h.allFinite() || !(std::abs(h.determinant()) > 1e-12 * scale))
    throw std::invalid_argument("simulate_ber: channel matrix is singular");
  const Eigen::Matrix2cd equalizer = h.inverse();

  LinkReport report;
  report.line_rate = line_rate(config.baud, config.polarizations, config.bits_per_symbol_per_pol);
  report.net_rate = net_rate(report.line_rate, config.total_overhead);

  // Unit symbol energy per polarization, two bits per symbol.
  const bool noiseless = std::isinf(config.snr_db) && config.snr_db > 0;
  const double n0 = noiseless ? 0.0 : 1.0 / (2.0 * std::pow(10.0, config.snr_db / 10.0));
  const double amp = 1.0 / std::numbers::sqrt2;

  Rng rng(seed);
  for (std::int64_t n = 0; n < n_symbols; ++n) {
    const std::uint64_t word = rng.bits();
    Eigen::Vector2cd x;
    for (int p = 0; p < 2; ++p) {
      const int b_i = (word >> (2 * p)) & 1;
      const int b_q = (word >> (2 * p + 1)) & 1;
      x(p) = {b_i ? -amp : amp, b_q ? -amp : amp};
    }
    Eigen::Vector2cd y = h * x;
    for (int p = 0; p < 2; ++p) {
      const std::complex<double> w = rng.complex_normal(1.0);
      y(p) += std::sqrt(n0) * w;
    }
    const Eigen::Vector2cd z = equalizer * y;
    for (int p = 0; p < 2; ++p) {
      const int b_i = (word >> (2 * p)) & 1;
      const int b_q = (word >> (2 * p + 1)) & 1;
      report.n_errors += (z(p).real() < 0.0) != (b_i == 1);
      report.n_errors += (z(p).imag() < 0.0) != (b_q == 1);
    }
  }
  report.n_bits = static_cast<std::uint64_t>(n_symbols) * 4;
  report.ber = static_cast<double>(report.n_errors) / static_cast<double>(report.n_bits);
  report.pre_fec_ok = report.ber <= config.fec_threshold;
  return report;
}

}  // namespace cfran
