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

#include <doctest.h>

#include <cmath>

#include "cfran/coding2d.hpp"
#include "cfran/rng.hpp"
#include "oracles.hpp"

using namespace cfran;

namespace {

BitMatrix random_info(const Code2DConfig& cfg, Rng& rng) {
  BitMatrix info(cfg.n_streams, cfg.n_info_per_stream);
  for (Eigen::Index i = 0; i < info.size(); ++i) info(i) = static_cast<std::uint8_t>(rng.below(2));
  return info;
}

LlrGrid strong_llrs(const CodeGrid& grid, double magnitude = 20.0) {
  LlrGrid l;
  l.llr = grid.bits.cast<double>().unaryExpr([&](double b) { return b ? -magnitude : magnitude; });
  return l;
}

}  // namespace

TEST_SUITE("coding2d") {

TEST_CASE("hand traced (7,5) codeword") {
  const std::vector<std::uint8_t> info = {1, 0, 0, 0};
  const std::vector<std::uint8_t> want = {1, 1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0};
  CHECK(conv_encode(info) == want);
  CHECK(is_conv_codeword(want));
  auto broken = want;
  broken[3] ^= 1;
  CHECK_FALSE(is_conv_codeword(broken));

  Code2DConfig cfg;
  cfg.n_streams = 1;
  cfg.n_info_per_stream = 4;
  BitMatrix m(1, 4);
  m << 1, 0, 0, 0;
  const CodeGrid grid = encode2d(m, cfg);
  REQUIRE(grid.bits.rows() == 12);
  REQUIRE(grid.bits.cols() == 2);
  for (int t = 0; t < 12; ++t) {
    CHECK(grid.bits(t, 0) == want[t]);
    CHECK(grid.bits(t, 1) == want[t]);
  }
}

TEST_CASE("all-zero info encodes to zeros") {
  Code2DConfig cfg;
  const BitMatrix zero = BitMatrix::Zero(cfg.n_streams, cfg.n_info_per_stream);
  CHECK(encode2d(zero, cfg).bits.cast<int>().sum() == 0);
}

TEST_CASE("encoder invariants and linearity") {
  Rng rng(1);
  Code2DConfig cfg;
  cfg.n_info_per_stream = 12;
  cfg.n_streams = 3;
  for (int trial = 0; trial < 1000; ++trial) {
    const BitMatrix a = random_info(cfg, rng), b = random_info(cfg, rng);
    const CodeGrid ga = encode2d(a, cfg);
    REQUIRE(ga.bits.rows() == cfg.n_time());
    for (int s = 0; s < cfg.n_columns(); ++s) {
      std::vector<std::uint8_t> col(ga.bits.rows());
      for (int t = 0; t < cfg.n_time(); ++t) col[t] = ga.bits(t, s);
      CHECK(is_conv_codeword(col));
    }
    for (int t = 0; t < cfg.n_time(); ++t) {
      int x = 0;
      for (int s = 0; s < cfg.n_columns(); ++s) x ^= ga.bits(t, s);
      CHECK(x == 0);
    }
    const auto bitxor = [](std::uint8_t x, std::uint8_t y) { return static_cast<std::uint8_t>(x ^ y); };
    const BitMatrix sum = a.binaryExpr(b, bitxor);
    const BitMatrix enc_sum = ga.bits.binaryExpr(encode2d(b, cfg).bits, bitxor);
    CHECK(encode2d(sum, cfg).bits == enc_sum);
  }
}

TEST_CASE("encoder rejects bad dimensions") {
  Code2DConfig cfg;
  CHECK_THROWS_AS(encode2d(BitMatrix::Zero(cfg.n_streams + 1, cfg.n_info_per_stream), cfg), std::invalid_argument);
  CHECK_THROWS_AS(encode2d(BitMatrix::Zero(cfg.n_streams, 3), cfg), std::invalid_argument);
  cfg.n_streams = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("exhaustive noiseless round trip, small codes") {
  for (int s = 1; s <= 2; ++s)
    for (int n = 1; n <= 4; ++n) {
      Code2DConfig cfg;
      cfg.n_streams = s;
      cfg.n_info_per_stream = n;
      const int total = s * n;
      for (long word = 0; word < (1L << total); ++word) {
        BitMatrix info(s, n);
        for (int i = 0; i < total; ++i) info(i / n, i % n) = (word >> i) & 1;
        CHECK(decode2d(strong_llrs(encode2d(info, cfg)), cfg) == info);
      }
    }
}

TEST_CASE("random noiseless round trip") {
  Rng rng(2);
  Code2DConfig cfg;
  for (int iters : {1, 3}) {
    cfg.decoder_iterations = iters;
    for (int trial = 0; trial < 1000 / iters; ++trial) {
      const BitMatrix info = random_info(cfg, rng);
      CHECK(decode2d(strong_llrs(encode2d(info, cfg), 1e6), cfg) == info);
    }
  }
}

TEST_CASE("space stage repairs a weak wrong LLR") {
  Code2DConfig cfg;
  cfg.n_streams = 3;
  cfg.n_info_per_stream = 8;
  Rng rng(3);
  const BitMatrix info = random_info(cfg, rng);
  LlrGrid l = strong_llrs(encode2d(info, cfg), 8.0);
  // Flip one entry weakly; row min-sum sends back +/-8 with the right sign.
  l.llr(5, 1) = -0.5 * l.llr(5, 1) / 8.0;
  Eigen::RowVectorXd row = l.llr.row(5);
  const auto ext = spc_extrinsic(row);
  CHECK(std::abs(ext(1)) == doctest::Approx(8.0));
  CHECK(std::signbit(row(1) + ext(1)) == std::signbit(-row(1)));
  CHECK(decode2d(l, cfg) == info);
}

TEST_CASE("min-sum extrinsic traced by hand") {
  Eigen::RowVector4d row(2.0, -1.0, 3.0, 0.5);
  const auto e = spc_extrinsic(row);
  // Signs: product of others; magnitude: min of others.
  CHECK(e(0) == doctest::Approx(-0.5));
  CHECK(e(1) == doctest::Approx(0.5));
  CHECK(e(2) == doctest::Approx(-0.5));
  CHECK(e(3) == doctest::Approx(-1.0));
}

TEST_CASE("viterbi alone meets the textbook regime") {
  // Rate-1/2 (7,5) at Eb/N0 = 5 dB; union bound territory is well under 1e-3.
  Rng rng(4);
  const double ebn0 = std::pow(10.0, 0.5);
  const double sigma = std::sqrt(1.0 / (2.0 * 0.5 * ebn0));
  long errors = 0, bits = 0;
  for (int block = 0; block < 200; ++block) {
    std::vector<std::uint8_t> info(1000);
    for (auto& b : info) b = static_cast<std::uint8_t>(rng.below(2));
    const auto coded = conv_encode(info);
    std::vector<double> llr(coded.size());
    for (std::size_t i = 0; i < coded.size(); ++i) {
      const double y = (coded[i] ? -1.0 : 1.0) + sigma * rng.normal();
      llr[i] = 2.0 * y / (sigma * sigma);
    }
    const auto dec = viterbi_decode(llr);
    for (std::size_t i = 0; i < info.size(); ++i) errors += dec[i] != info[i];
    bits += static_cast<long>(info.size());
  }
  CHECK(static_cast<double>(errors) / bits < 1e-3);
}

TEST_CASE("maxlog extrinsic agrees with viterbi on clean input") {
  Rng rng(6);
  std::vector<std::uint8_t> info(20);
  for (auto& b : info) b = static_cast<std::uint8_t>(rng.below(2));
  const auto coded = conv_encode(info);
  std::vector<double> llr(coded.size());
  for (std::size_t i = 0; i < coded.size(); ++i) llr[i] = coded[i] ? -4.0 : 4.0;
  const auto ext = maxlog_extrinsic(llr);
  for (std::size_t i = 0; i < coded.size(); ++i) CHECK((ext[i] + llr[i] < 0) == (coded[i] == 1));
}

TEST_CASE("ber_sim basics") {
  Code2DConfig cfg;
  CHECK(ber_sim(cfg, INFINITY, 20, 1, false).ber == 0.0);
  CHECK(ber_sim(cfg, INFINITY, 20, 1, true).ber == 0.0);
  const BerResult a = ber_sim(cfg, 2.0, 50, 9, false);
  const BerResult b = ber_sim(cfg, 2.0, 50, 9, false);
  CHECK(a.ber == b.ber);
  CHECK(a.n_errors == b.n_errors);
  CHECK(a.n_bits == 50u * cfg.n_streams * cfg.n_info_per_stream);
}

TEST_CASE("full decoder beats the ablated one") {
  Code2DConfig cfg;
  const int blocks = 100000 / (cfg.n_streams * cfg.n_info_per_stream) + 1;
  const BerResult full = ber_sim(cfg, 3.0, blocks, 17, false);
  const BerResult ablated = ber_sim(cfg, 3.0, blocks, 17, true);
  const double se = std::hypot(full.standard_error(), ablated.standard_error());
  CHECK(ablated.ber - full.ber >= 3.0 * se);
}

TEST_CASE("latency model") {
  Code2DConfig one;
  one.n_streams = 1;
  const LatencyBreakdown a = latency_model(one, 1000, 1e-9);
  CHECK(a.total() == doctest::Approx(2.0 * (1000 + 2) * 1e-9 + 1e-9).epsilon(1e-12));

  Code2DConfig ten;
  ten.n_streams = 10;
  const LatencyBreakdown b = latency_model(ten, 1000, 1e-9);
  CHECK(b.time_term * 10.0 == a.time_term);
  CHECK(10 * b.time_steps == a.time_steps);

  const LatencyBreakdown c = latency_model(ten, 1000, 2e-9);
  CHECK(c.time_term == 2.0 * b.time_term);

  Code2DConfig three;
  three.n_streams = 3;
  CHECK_THROWS_AS(latency_model(three, 1000, 1e-9), std::invalid_argument);
}

}  // TEST_SUITE
