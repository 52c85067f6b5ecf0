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

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cfran/channel.hpp"

namespace cfran {

template <typename Scalar>
using ColumnVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// ---------------------------------------------------------------------------
// Detection
// ---------------------------------------------------------------------------

/// Post-detection SINR of each stream for joint LMMSE detection with unit
/// per-stream transmit power:
///
///   SINR_k = 1 / [(I + H^H H / noise_var)^-1]_kk - 1
///
/// H is (receive antennas x streams). Works for real or complex scalars.
template <typename Derived>
ColumnVector<typename Derived::RealScalar> lmmse_sinr(
    const Eigen::MatrixBase<Derived>& h,
    typename Derived::RealScalar noise_var) {
  using Real = typename Derived::RealScalar;
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (h.rows() < 1 || h.cols() < 1)
    throw std::invalid_argument("lmmse_sinr: empty channel matrix");
  if (!(noise_var > Real(0)) || !std::isfinite(noise_var))
    throw std::invalid_argument("lmmse_sinr: noise variance must be positive and finite");
  if (!h.allFinite()) throw std::invalid_argument("lmmse_sinr: non-finite channel entry");

  const Eigen::Index k = h.cols();
  Matrix gram = h.adjoint() * h / noise_var;
  gram.diagonal().array() += Scalar(1);
  const Matrix inv = gram.llt().solve(Matrix::Identity(k, k));
  ColumnVector<Real> sinr(k);
  for (Eigen::Index i = 0; i < k; ++i)
    sinr(i) = std::max(Real(0), Real(1) / std::real(inv(i, i)) - Real(1));
  return sinr;
}

/// Sum over streams of log2(1 + SINR). Throws on negative or NaN entries.
template <typename Derived>
typename Derived::Scalar sum_se(const Eigen::MatrixBase<Derived>& sinr) {
  using Real = typename Derived::Scalar;
  Real se = 0;
  for (Eigen::Index i = 0; i < sinr.size(); ++i) {
    if (!(sinr(i) >= Real(0))) throw std::invalid_argument("sum_se: SINR must be >= 0");
    se += std::log2(Real(1) + sinr(i));
  }
  return se;
}

struct DetectionReport {
  Eigen::VectorXd sinr;
  Eigen::VectorXd per_stream_se;
  double se = 0.0;
};

DetectionReport detect_lmmse(const Eigen::MatrixXcd& h, double noise_var);

// ---------------------------------------------------------------------------
// Downlink precoding
// ---------------------------------------------------------------------------

/// Regularized zero-forcing for the downlink channel H^T, where H is the
/// (BS antennas x streams) uplink matrix. Regularizer noise_var * K; every
/// column scaled to unit norm.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> rzf_precoder(
    const Eigen::MatrixBase<Derived>& h, typename Derived::RealScalar noise_var) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index k = h.cols();
  Matrix gram = h.transpose() * h.conjugate();
  gram.diagonal().array() += Scalar(noise_var * static_cast<double>(k));
  Matrix w = h.conjugate() * gram.ldlt().solve(Matrix::Identity(k, k));
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto norm = w.col(j).norm();
    if (norm > 0) w.col(j) /= norm;
  }
  return w;
}

/// Per-stream downlink SINR of precoder W over channel H^T, unit power per
/// stream.
template <typename DerivedH, typename DerivedW>
ColumnVector<typename DerivedH::RealScalar> downlink_sinr(
    const Eigen::MatrixBase<DerivedH>& h, const Eigen::MatrixBase<DerivedW>& w,
    typename DerivedH::RealScalar noise_var) {
  using Real = typename DerivedH::RealScalar;
  const auto effective = (h.transpose() * w).eval();
  const Eigen::Index k = effective.rows();
  ColumnVector<Real> sinr(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Real signal = std::norm(effective(i, i));
    const Real total = effective.row(i).squaredNorm();
    sinr(i) = signal / (total - signal + noise_var);
  }
  return sinr;
}

/// One precoder per group of `group_size` consecutive PRBs.
struct PrecoderSet {
  int group_size = 1;
  std::vector<Eigen::MatrixXcd> groups;

  const Eigen::MatrixXcd& for_prb(int prb) const { return groups.at(prb / group_size); }
};

/// RB-grouped RZF: each group's precoder is computed from the channel of the
/// group's center PRB. Throws if group_size does not divide the PRB count.
PrecoderSet rb_group_precode(const Csi& csi, const Topology& topology,
                             int group_size, double noise_var);

/// Downlink sum SE averaged over PRBs, evaluating each PRB's precoder on
/// that PRB's own channel.
double downlink_se(const Csi& csi, const Topology& topology,
                   const PrecoderSet& precoders, double noise_var);

// ---------------------------------------------------------------------------
// Pilots and channel estimation
// ---------------------------------------------------------------------------

struct PilotPlan {
  int n_pilots = 1;
  std::vector<int> assignment;  // UE -> pilot
};

/// Cross long-term gain between two UEs: cosine similarity of their
/// per-RRU path-gain vectors. 1 for co-located UEs.
double pilot_cross_gain(const Eigen::MatrixXd& long_term_gain, int u, int v);

/// Greedy pilot assignment with reuse. UEs are visited in descending total
/// long-term gain; each takes the pilot whose current holders have the
/// smallest maximum cross gain to it (empty pilots win, ties to the lowest
/// index).
PilotPlan assign_pilots(const Topology& topology, const Csi& csi_longterm,
                        int n_pilots);

/// Least-squares uplink estimate. Each UE's antennas use one orthogonal pilot
/// group; antenna j of every UE sharing the group contaminates antenna j of
/// the others. Adds CN(0, noise_var) per entry.
Csi estimate_channels(const Csi& csi, const PilotPlan& plan, double noise_var,
                      std::uint64_t seed);

// ---------------------------------------------------------------------------
// Reciprocity calibration
// ---------------------------------------------------------------------------

/// Over-the-air exchange between antennas i and j:
///   forward = y_ij = r_j h t_i   (i transmits, j receives)
///   reverse = y_ji = r_i h t_j
struct ReciprocalMeasurement {
  int i = 0;
  int j = 0;
  std::complex<double> forward;
  std::complex<double> reverse;
};

struct CalibrationCoefficients {
  Eigen::VectorXcd c;  // t_i / r_i relative to the reference antenna
  int reference_antenna = 0;
};

/// Least-squares solve of c_j y_ij = c_i y_ji over all measured pairs with
/// c[reference] = 1. Throws std::invalid_argument when the measurement graph
/// does not connect every antenna.
CalibrationCoefficients calibrate(int n_antennas,
                                  std::span<const ReciprocalMeasurement> measurements,
                                  int reference_antenna = 0);

/// Full-mesh exchange with reciprocal CN(0,1) propagation and CN(0, noise_var)
/// receiver noise on every measurement.
std::vector<ReciprocalMeasurement> simulate_calibration_exchange(
    const Eigen::VectorXcd& tx_gain, const Eigen::VectorXcd& rx_gain,
    double noise_var, std::uint64_t seed);

/// Ground-truth coefficients t_i / r_i normalized to the reference antenna.
Eigen::VectorXcd true_calibration(const Eigen::VectorXcd& tx_gain,
                                  const Eigen::VectorXcd& rx_gain,
                                  int reference_antenna = 0);

/// max_j |estimate_j - truth_j| / |truth_j|.
double max_relative_error(const Eigen::VectorXcd& estimate, const Eigen::VectorXcd& truth);

/// One calibration round on `n_antennas` radios with random gains (amplitude
/// uniform in [0.5, 1.5], uniform phase): full-mesh exchange, least-squares
/// solve against antenna 0, max relative coefficient error. The gains and
/// the propagation draws depend only on `seed`, so trials are paired across
/// noise levels.
double calibration_trial(int n_antennas, double noise_var, std::uint64_t seed);

// ---------------------------------------------------------------------------

/// streams * bits_per_symbol * code_rate * (1 - overhead).
double peak_se(int streams, int bits_per_symbol, double code_rate, double overhead);

}  // namespace cfran
