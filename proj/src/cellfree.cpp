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

#include "cfran/cellfree.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <queue>
#include <string>

#include "cfran/rng.hpp"

namespace cfran {

DetectionReport detect_lmmse(const Eigen::MatrixXcd& h, double noise_var) {
  DetectionReport report;
  report.sinr = lmmse_sinr(h, noise_var);
  report.per_stream_se = (1.0 + report.sinr.array()).log() / std::log(2.0);
  report.se = report.per_stream_se.sum();
  return report;
}

PrecoderSet rb_group_precode(const Csi& csi, const Topology& topology,
                             int group_size, double noise_var) {
  if (group_size < 1 || topology.n_prbs % group_size != 0)
    throw std::invalid_argument("rb_group_precode: group size " + std::to_string(group_size) +
                                " does not divide " + std::to_string(topology.n_prbs) + " PRBs");
  PrecoderSet set;
  set.group_size = group_size;
  const int n_groups = topology.n_prbs / group_size;
  set.groups.reserve(n_groups);
  for (int g = 0; g < n_groups; ++g) {
    const int center = g * group_size + group_size / 2;
    set.groups.push_back(rzf_precoder(csi.h.at(topology.prb_tone(center)), noise_var));
  }
  return set;
}

double downlink_se(const Csi& csi, const Topology& topology,
                   const PrecoderSet& precoders, double noise_var) {
  double total = 0.0;
  for (int p = 0; p < topology.n_prbs; ++p) {
    const auto& h = csi.h.at(topology.prb_tone(p));
    total += sum_se(downlink_sinr(h, precoders.for_prb(p), noise_var));
  }
  return total / topology.n_prbs;
}

double pilot_cross_gain(const Eigen::MatrixXd& long_term_gain, int u, int v) {
  const auto a = long_term_gain.col(u);
  const auto b = long_term_gain.col(v);
  const double denom = a.norm() * b.norm();
  return denom > 0.0 ? a.dot(b) / denom : 0.0;
}

PilotPlan assign_pilots(const Topology& topology, const Csi& csi_longterm,
                        int n_pilots) {
  if (n_pilots < 1) throw std::invalid_argument("assign_pilots: need at least one pilot");
  const int n_ues = topology.n_ues();
  const Eigen::MatrixXd& beta = csi_longterm.long_term_gain;

  std::vector<int> order(n_ues);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return beta.col(a).sum() > beta.col(b).sum();
  });

  PilotPlan plan;
  plan.n_pilots = n_pilots;
  plan.assignment.assign(n_ues, -1);
  std::vector<std::vector<int>> holders(n_pilots);
  for (int u : order) {
    int best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (int p = 0; p < n_pilots; ++p) {
      double score = -1.0;  // empty pilot
      for (int v : holders[p]) score = std::max(score, pilot_cross_gain(beta, u, v));
      if (score < best_score) {
        best_score = score;
        best = p;
      }
    }
    plan.assignment[u] = best;
    holders[best].push_back(u);
  }
  return plan;
}

Csi estimate_channels(const Csi& csi, const PilotPlan& plan, double noise_var,
                      std::uint64_t seed) {
  const int n_ues = csi.n_ues();
  if (static_cast<int>(plan.assignment.size()) != n_ues)
    throw std::invalid_argument("estimate_channels: pilot plan does not cover every UE");
  for (int p : plan.assignment)
    if (p < 0 || p >= plan.n_pilots)
      throw std::invalid_argument("estimate_channels: pilot index out of range");

  Csi est = csi;
  Rng rng(seed);
  for (int s = 0; s < csi.n_subcarriers(); ++s) {
    const Eigen::MatrixXcd& truth = csi.h[s];
    Eigen::MatrixXcd& out = est.h[s];
    for (int u = 0; u < n_ues; ++u) {
      const int width = csi.ue_offsets[u + 1] - csi.ue_offsets[u];
      for (int j = 0; j < width; ++j) {
        Eigen::VectorXcd y = truth.col(csi.ue_offsets[u] + j);
        for (int v = 0; v < n_ues; ++v) {
          if (v == u || plan.assignment[v] != plan.assignment[u]) continue;
          if (j < csi.ue_offsets[v + 1] - csi.ue_offsets[v]) y += truth.col(csi.ue_offsets[v] + j);
        }
        if (noise_var > 0.0)
          for (Eigen::Index m = 0; m < y.size(); ++m) y(m) += rng.complex_normal(noise_var);
        out.col(csi.ue_offsets[u] + j) = y;
      }
    }
  }
  return est;
}

namespace {

bool connected(int n, std::span<const ReciprocalMeasurement> measurements) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& m : measurements) {
    adj[m.i].push_back(m.j);
    adj[m.j].push_back(m.i);
  }
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int count = 1;
  while (!frontier.empty()) {
    const int a = frontier.front();
    frontier.pop();
    for (int b : adj[a])
      if (!seen[b]) {
        seen[b] = true;
        ++count;
        frontier.push(b);
      }
  }
  return count == n;
}

}  // namespace

CalibrationCoefficients calibrate(int n_antennas,
                                  std::span<const ReciprocalMeasurement> measurements,
                                  int reference_antenna) {
  if (n_antennas < 1) throw std::invalid_argument("calibrate: need at least one antenna");
  if (reference_antenna < 0 || reference_antenna >= n_antennas)
    throw std::invalid_argument("calibrate: reference antenna out of range");
  for (const auto& m : measurements) {
    if (m.i < 0 || m.j < 0 || m.i >= n_antennas || m.j >= n_antennas || m.i == m.j)
      throw std::invalid_argument("calibrate: bad antenna pair");
    if (!std::isfinite(std::abs(m.forward)) || !std::isfinite(std::abs(m.reverse)))
      throw std::invalid_argument("calibrate: non-finite measurement");
  }
  if (!connected(n_antennas, measurements))
    throw std::invalid_argument("calibrate: measurement graph is disconnected; "
                                "coefficients are not identifiable");

  CalibrationCoefficients out;
  out.reference_antenna = reference_antenna;
  out.c = Eigen::VectorXcd::Ones(n_antennas);
  if (n_antennas == 1) return out;

  // Unknowns are every c except the reference; column index skips it.
  auto column = [&](int a) { return a < reference_antenna ? a : a - 1; };
  const Eigen::Index rows = static_cast<Eigen::Index>(measurements.size());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(rows, n_antennas - 1);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(rows);
  for (Eigen::Index row = 0; row < rows; ++row) {
    const auto& m = measurements[row];
    // c_j * y_ij - c_i * y_ji = 0
    if (m.j == reference_antenna) b(row) -= m.forward;
    else a(row, column(m.j)) += m.forward;
    if (m.i == reference_antenna) b(row) += m.reverse;
    else a(row, column(m.i)) -= m.reverse;
  }
  const Eigen::VectorXcd x = a.colPivHouseholderQr().solve(b);
  for (int k = 0; k < n_antennas; ++k)
    if (k != reference_antenna) out.c(k) = x(column(k));
  if (!out.c.allFinite() || (out.c.array().abs() == 0.0).any())
    throw std::runtime_error("calibrate: degenerate solution");
  return out;
}

std::vector<ReciprocalMeasurement> simulate_calibration_exchange(
    const Eigen::VectorXcd& tx_gain, const Eigen::VectorXcd& rx_gain,
    double noise_var, std::uint64_t seed) {
  if (tx_gain.size() != rx_gain.size())
    throw std::invalid_argument("calibration exchange: gain vectors differ in length");
  Rng rng(seed);
  const int n = static_cast<int>(tx_gain.size());
  std::vector<ReciprocalMeasurement> out;
  out.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> h = rng.complex_normal();
      ReciprocalMeasurement m{i, j, rx_gain(j) * h * tx_gain(i), rx_gain(i) * h * tx_gain(j)};
      if (noise_var > 0.0) {
        m.forward += rng.complex_normal(noise_var);
        m.reverse += rng.complex_normal(noise_var);
      }
      out.push_back(m);
    }
  return out;
}

Eigen::VectorXcd true_calibration(const Eigen::VectorXcd& tx_gain,
                                  const Eigen::VectorXcd& rx_gain,
                                  int reference_antenna) {
  Eigen::VectorXcd c = tx_gain.cwiseQuotient(rx_gain);
  return c / c(reference_antenna);
}

double max_relative_error(const Eigen::VectorXcd& estimate, const Eigen::VectorXcd& truth) {
  if (estimate.size() != truth.size())
    throw std::invalid_argument("max_relative_error: size mismatch");
  double worst = 0.0;
  for (Eigen::Index j = 0; j < truth.size(); ++j)
    worst = std::max(worst, std::abs(estimate(j) - truth(j)) / std::abs(truth(j)));
  return worst;
}

double calibration_trial(int n_antennas, double noise_var, std::uint64_t seed) {
  if (n_antennas < 2) throw std::invalid_argument("calibration_trial: need at least two antennas");
  Rng rng(derive_seed(seed, 1));
  Eigen::VectorXcd t(n_antennas), r(n_antennas);
  for (int j = 0; j < n_antennas; ++j) {
    t(j) = std::polar(0.5 + rng.uniform(), 2.0 * std::numbers::pi * rng.uniform());
    r(j) = std::polar(0.5 + rng.uniform(), 2.0 * std::numbers::pi * rng.uniform());
  }
  const auto meas = simulate_calibration_exchange(t, r, noise_var, derive_seed(seed, 2));
  return max_relative_error(calibrate(n_antennas, meas).c, true_calibration(t, r));
}

double peak_se(int streams, int bits_per_symbol, double code_rate, double overhead) {
  if (streams < 0 || bits_per_symbol < 0)
    throw std::invalid_argument("peak_se: counts must be non-negative");
  if (!(code_rate > 0.0 && code_rate <= 1.0))
    throw std::invalid_argument("peak_se: code rate must lie in (0, 1]");
  if (!(overhead >= 0.0 && overhead < 1.0))
    throw std::invalid_argument("peak_se: overhead must lie in [0, 1)");
  return streams * bits_per_symbol * code_rate * (1.0 - overhead);
}

}  // namespace cfran
