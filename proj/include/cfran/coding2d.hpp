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
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cfran {

using BitMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Spatiotemporal product code: every information stream is encoded in time
/// by the terminated rate-1/2, constraint-length-3 (7,5) convolutional code,
/// then one single-parity-check stream is added across the S coded streams.
struct Code2DConfig {
  int n_info_per_stream = 64;
  int n_streams = 4;  // S, excluding the parity stream
  int decoder_iterations = 1;

  /// Coded length of one stream, two tail bits included.
  int n_time() const { return 2 * (n_info_per_stream + 2); }
  int n_columns() const { return n_streams + 1; }
  /// Information bits per transmitted bit.
  double rate() const {
    return static_cast<double>(n_streams) * n_info_per_stream /
           (static_cast<double>(n_time()) * n_columns());
  }
  void validate() const;
};

/// bits(t, s): coded bit at time index t on stream s; column S is the parity
/// stream, so every row XORs to zero.
struct CodeGrid {
  BitMatrix bits;
};

/// Same layout as CodeGrid. Positive LLR means bit 0 is more likely.
struct LlrGrid {
  Eigen::MatrixXd llr;
};

// Time-domain component code -------------------------------------------------

/// Terminated (7,5) encoder: 2 * (info.size() + 2) output bits, ordered
/// (g=7, g=5) per trellis step.
std::vector<std::uint8_t> conv_encode(std::span<const std::uint8_t> info);

/// True when `coded` is a terminated (7,5) codeword.
bool is_conv_codeword(std::span<const std::uint8_t> coded);

/// Soft-input Viterbi over a terminated trellis. Returns the n_info
/// information bits of the most likely path.
std::vector<std::uint8_t> viterbi_decode(std::span<const double> llr);

/// Max-log-MAP over the terminated trellis; returns extrinsic LLRs for each
/// coded bit.
std::vector<double> maxlog_extrinsic(std::span<const double> llr);

// Space-domain component code ------------------------------------------------

/// Min-sum single-parity-check extrinsic for one row:
///   e_i = prod_{j != i} sign(L_j) * min_{j != i} |L_j|
template <typename Derived>
Eigen::Matrix<double, 1, Eigen::Dynamic> spc_extrinsic(const Eigen::MatrixBase<Derived>& row) {
  const Eigen::Index n = row.size();
  Eigen::Matrix<double, 1, Eigen::Dynamic> out(n);
  if (n < 2) {
    out.setZero();
    return out;
  }
  double min1 = std::numeric_limits<double>::infinity();
  double min2 = min1;
  Eigen::Index argmin = 0;
  bool negative = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(row(i));
    if (row(i) < 0.0) negative = !negative;
    if (a < min1) {
      min2 = min1;
      min1 = a;
      argmin = i;
    } else if (a < min2) {
      min2 = a;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool sign = negative != (row(i) < 0.0);
    const double mag = i == argmin ? min2 : min1;
    out(i) = sign ? -mag : mag;
  }
  return out;
}

// 2-D code -------------------------------------------------------------------

/// info is (S x n_info_per_stream). Throws on dimension mismatch.
CodeGrid encode2d(const BitMatrix& info, const Code2DConfig& config);

struct DecodeOptions {
  bool ablate_space = false;  // skip the space stage; Viterbi on channel LLRs
};

/// Each iteration refines every row with the parity check (rows independent),
/// then decodes every stream in time. Iterations beyond the first feed
/// max-log-MAP extrinsics of all S+1 columns back to the row stage. Returns
/// the (S x n_info_per_stream) decoded information bits.
BitMatrix decode2d(const LlrGrid& llrs, const Code2DConfig& config,
                   DecodeOptions options = {});

struct BerResult {
  double ber = 0.0;
  std::uint64_t n_bits = 0;
  std::uint64_t n_errors = 0;

  /// Binomial standard error of the BER estimate.
  double standard_error() const;
};

/// BPSK over AWGN at the given Eb/N0 per information bit (parity and tail
/// overhead charged). An infinite Eb/N0 means noiseless. Block b draws from
/// a stream derived from (seed, b), so full and ablated runs see the same
/// noise.
BerResult ber_sim(const Code2DConfig& config, double ebn0_db, int n_blocks,
                  std::uint64_t seed, bool ablate_space);

/// Counted-steps latency for delivering `total_info_bits` spread over S
/// streams: the info-bearing time rows, the termination rows, and one
/// pipeline step for the parallel space stage. `time_steps` is the exact
/// integer count behind `time_term`.
struct LatencyBreakdown {
  std::int64_t time_steps = 0;
  double time_term = 0.0;
  double termination_term = 0.0;
  double space_term = 0.0;
  double total() const { return time_term + termination_term + space_term; }
};

LatencyBreakdown latency_model(const Code2DConfig& config, std::int64_t total_info_bits,
                               double time_per_trellis_step);

}  // namespace cfran
