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

#include "cfran/coding2d.hpp"

#include <array>
#include <limits>
#include <stdexcept>
#include <string>

#include "cfran/rng.hpp"

namespace cfran {

namespace {

// State = (previous bit, bit before) packed as 2*s1 + s2.
struct Branch {
  int next;
  std::uint8_t out0;  // generator 7 (111)
  std::uint8_t out1;  // generator 5 (101)
};

constexpr Branch branch(int state, int bit) {
  const int s1 = state >> 1;
  const int s2 = state & 1;
  return Branch{(bit << 1) | s1, static_cast<std::uint8_t>(bit ^ s1 ^ s2),
                static_cast<std::uint8_t>(bit ^ s2)};
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Half-LLR correlation: +L/2 when the bit is 0, -L/2 when it is 1.
inline double bit_metric(double llr, std::uint8_t bit) { return bit ? -0.5 * llr : 0.5 * llr; }

int trellis_steps(std::size_t coded_len) {
  if (coded_len < 4 || coded_len % 2 != 0)
    throw std::invalid_argument("terminated (7,5) codeword length must be even and >= 4");
  return static_cast<int>(coded_len / 2);
}

}  // namespace

void Code2DConfig::validate() const {
  if (n_info_per_stream < 1) throw std::invalid_argument("coding2d: n_info_per_stream must be >= 1");
  if (n_streams < 1) throw std::invalid_argument("coding2d: n_streams must be >= 1");
  if (decoder_iterations < 1) throw std::invalid_argument("coding2d: decoder_iterations must be >= 1");
}

double BerResult::standard_error() const {
  if (n_bits == 0) return 0.0;
  return std::sqrt(ber * (1.0 - ber) / static_cast<double>(n_bits));
}

std::vector<std::uint8_t> conv_encode(std::span<const std::uint8_t> info) {
  std::vector<std::uint8_t> out;
  out.reserve(2 * (info.size() + 2));
  int state = 0;
  auto push = [&](int bit) {
    const Branch b = branch(state, bit);
    out.push_back(b.out0);
    out.push_back(b.out1);
    state = b.next;
  };
  for (std::uint8_t bit : info) push(bit & 1);
  push(0);
  push(0);
  return out;
}

bool is_conv_codeword(std::span<const std::uint8_t> coded) {
  if (coded.size() < 4 || coded.size() % 2 != 0) return false;
  // The (7,5) code is non-catastrophic: info bit t is out1 ^ s2, so the
  // sequence is reconstructed step by step and re-encoded.
  std::vector<std::uint8_t> info;
  int state = 0;
  for (std::size_t t = 0; t + 1 < coded.size(); t += 2) {
    const int bit = coded[t + 1] ^ (state & 1);
    const Branch b = branch(state, bit);
    if (b.out0 != coded[t]) return false;
    info.push_back(static_cast<std::uint8_t>(bit));
    state = b.next;
  }
  if (state != 0 || info.size() < 2) return false;
  return info[info.size() - 1] == 0 && info[info.size() - 2] == 0;
}

std::vector<std::uint8_t> viterbi_decode(std::span<const double> llr) {
  const int steps = trellis_steps(llr.size());
  std::array<double, 4> metric{0.0, kNegInf, kNegInf, kNegInf};
  // survivor[t][state] = (previous state, input bit)
  std::vector<std::array<std::uint8_t, 4>> prev_state(steps);
  std::vector<std::array<std::uint8_t, 4>> input(steps);
  for (int t = 0; t < steps; ++t) {
    std::array<double, 4> next{kNegInf, kNegInf, kNegInf, kNegInf};
    const bool tail = t >= steps - 2;
    for (int s = 0; s < 4; ++s) {
      if (metric[s] == kNegInf) continue;
      for (int bit = 0; bit <= (tail ? 0 : 1); ++bit) {
        const Branch b = branch(s, bit);
        const double m = metric[s] + bit_metric(llr[2 * t], b.out0) +
                         bit_metric(llr[2 * t + 1], b.out1);
        if (m > next[b.next]) {
          next[b.next] = m;
          prev_state[t][b.next] = static_cast<std::uint8_t>(s);
          input[t][b.next] = static_cast<std::uint8_t>(bit);
        }
      }
    }
    metric = next;
  }
  std::vector<std::uint8_t> bits(steps);
  int state = 0;
  for (int t = steps - 1; t >= 0; --t) {
    bits[t] = input[t][state];
    state = prev_state[t][state];
  }
  bits.resize(steps - 2);
  return bits;
}

std::vector<double> maxlog_extrinsic(std::span<const double> llr) {
  const int steps = trellis_steps(llr.size());
  std::vector<std::array<double, 4>> alpha(steps + 1, {kNegInf, kNegInf, kNegInf, kNegInf});
  std::vector<std::array<double, 4>> beta(steps + 1, {kNegInf, kNegInf, kNegInf, kNegInf});
  alpha[0][0] = 0.0;
  beta[steps][0] = 0.0;
  auto gamma = [&](int t, const Branch& b) {
    return bit_metric(llr[2 * t], b.out0) + bit_metric(llr[2 * t + 1], b.out1);
  };
  for (int t = 0; t < steps; ++t)
    for (int s = 0; s < 4; ++s) {
      if (alpha[t][s] == kNegInf) continue;
      for (int bit = 0; bit < 2; ++bit) {
        const Branch b = branch(s, bit);
        alpha[t + 1][b.next] = std::max(alpha[t + 1][b.next], alpha[t][s] + gamma(t, b));
      }
    }
  for (int t = steps - 1; t >= 0; --t)
    for (int s = 0; s < 4; ++s)
      for (int bit = 0; bit < 2; ++bit) {
        const Branch b = branch(s, bit);
        if (beta[t + 1][b.next] == kNegInf) continue;
        beta[t][s] = std::max(beta[t][s], beta[t + 1][b.next] + gamma(t, b));
      }

  std::vector<double> extrinsic(llr.size(), 0.0);
  for (int t = 0; t < steps; ++t) {
    std::array<double, 2> best0{kNegInf, kNegInf};
    std::array<double, 2> best1{kNegInf, kNegInf};
    for (int s = 0; s < 4; ++s) {
      if (alpha[t][s] == kNegInf) continue;
      for (int bit = 0; bit < 2; ++bit) {
        const Branch b = branch(s, bit);
        if (beta[t + 1][b.next] == kNegInf) continue;
        const double m = alpha[t][s] + gamma(t, b) + beta[t + 1][b.next];
        auto& slot0 = b.out0 ? best1[0] : best0[0];
        auto& slot1 = b.out1 ? best1[1] : best0[1];
        slot0 = std::max(slot0, m);
        slot1 = std::max(slot1, m);
      }
    }
    for (int o = 0; o < 2; ++o) {
      const double app = best0[o] - best1[o];
      extrinsic[2 * t + o] = std::isfinite(app) ? app - llr[2 * t + o] : 0.0;
    }
  }
  return extrinsic;
}

CodeGrid encode2d(const BitMatrix& info, const Code2DConfig& config) {
  config.validate();
  if (info.rows() != config.n_streams || info.cols() != config.n_info_per_stream)
    throw std::invalid_argument("encode2d: info must be " + std::to_string(config.n_streams) +
                                " x " + std::to_string(config.n_info_per_stream));
  CodeGrid grid;
  grid.bits = BitMatrix::Zero(config.n_time(), config.n_columns());
  std::vector<std::uint8_t> stream(config.n_info_per_stream);
  for (int s = 0; s < config.n_streams; ++s) {
    for (int i = 0; i < config.n_info_per_stream; ++i) stream[i] = info(s, i) & 1;
    const auto coded = conv_encode(stream);
    for (int t = 0; t < config.n_time(); ++t) {
      grid.bits(t, s) = coded[t];
      grid.bits(t, config.n_streams) ^= coded[t];
    }
  }
  return grid;
}

BitMatrix decode2d(const LlrGrid& llrs, const Code2DConfig& config, DecodeOptions options) {
  config.validate();
  const int n_time = config.n_time();
  const int n_cols = config.n_columns();
  if (llrs.llr.rows() != n_time || llrs.llr.cols() != n_cols)
    throw std::invalid_argument("decode2d: LLR grid must be " + std::to_string(n_time) + " x " +
                                std::to_string(n_cols));

  Eigen::MatrixXd decision_input = llrs.llr;
  if (!options.ablate_space) {
    Eigen::MatrixXd time_extrinsic = Eigen::MatrixXd::Zero(n_time, n_cols);
    for (int it = 0; it < config.decoder_iterations; ++it) {
      // Space stage: rows are independent.
      Eigen::MatrixXd space_extrinsic(n_time, n_cols);
      for (int t = 0; t < n_time; ++t)
        space_extrinsic.row(t) = spc_extrinsic(llrs.llr.row(t) + time_extrinsic.row(t));
      decision_input = llrs.llr + space_extrinsic;
      if (it + 1 == config.decoder_iterations) break;
      // Time stage soft outputs; the parity column is itself a codeword.
      std::vector<double> column(n_time);
      for (int c = 0; c < n_cols; ++c) {
        for (int t = 0; t < n_time; ++t) column[t] = decision_input(t, c);
        const auto ext = maxlog_extrinsic(column);
        for (int t = 0; t < n_time; ++t) time_extrinsic(t, c) = ext[t];
      }
    }
  }

  BitMatrix out(config.n_streams, config.n_info_per_stream);
  std::vector<double> column(n_time);
  for (int s = 0; s < config.n_streams; ++s) {
    for (int t = 0; t < n_time; ++t) column[t] = decision_input(t, s);
    const auto bits = viterbi_decode(column);
    for (int i = 0; i < config.n_info_per_stream; ++i) out(s, i) = bits[i];
  }
  return out;
}

BerResult ber_sim(const Code2DConfig& config, double ebn0_db, int n_blocks,
                  std::uint64_t seed, bool ablate_space) {
  config.validate();
  if (n_blocks < 1) throw std::invalid_argument("ber_sim: n_blocks must be >= 1");
  const bool noiseless = std::isinf(ebn0_db) && ebn0_db > 0;
  const double sigma2 =
      noiseless ? 0.0 : 1.0 / (2.0 * config.rate() * std::pow(10.0, ebn0_db / 10.0));
  constexpr double kNoiselessLlr = 1e6;

  BerResult result;
  for (int b = 0; b < n_blocks; ++b) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
    BitMatrix info(config.n_streams, config.n_info_per_stream);
    for (Eigen::Index i = 0; i < info.size(); ++i)
      info.data()[i] = static_cast<std::uint8_t>(rng.bits() & 1);
    const CodeGrid grid = encode2d(info, config);
    LlrGrid llrs{Eigen::MatrixXd(grid.bits.rows(), grid.bits.cols())};
    const double sigma = std::sqrt(sigma2);
    // Column-major walk keeps the noise draw order independent of options.
    for (Eigen::Index i = 0; i < grid.bits.size(); ++i) {
      const double x = grid.bits.data()[i] ? -1.0 : 1.0;
      llrs.llr.data()[i] = noiseless ? kNoiselessLlr * x : 2.0 * (x + sigma * rng.normal()) / sigma2;
    }
    const BitMatrix decoded = decode2d(llrs, config, DecodeOptions{ablate_space});
    result.n_errors += static_cast<std::uint64_t>((decoded.array() != info.array()).count());
    result.n_bits += static_cast<std::uint64_t>(info.size());
  }
  result.ber = static_cast<double>(result.n_errors) / static_cast<double>(result.n_bits);
  return result;
}

LatencyBreakdown latency_model(const Code2DConfig& config, std::int64_t total_info_bits,
                               double time_per_trellis_step) {
  config.validate();
  if (total_info_bits < 1 || total_info_bits % config.n_streams != 0)
    throw std::invalid_argument("latency_model: " + std::to_string(total_info_bits) +
                                " info bits cannot be split evenly over " +
                                std::to_string(config.n_streams) + " streams");
  if (!(time_per_trellis_step > 0.0))
    throw std::invalid_argument("latency_model: step time must be positive");
  const auto per_stream = total_info_bits / config.n_streams;
  LatencyBreakdown out;
  out.time_steps = 2 * per_stream;
  out.time_term = static_cast<double>(out.time_steps) * time_per_trellis_step;
  out.termination_term = 4.0 * time_per_trellis_step;
  out.space_term = time_per_trellis_step;
  return out;
}

}  // namespace cfran
