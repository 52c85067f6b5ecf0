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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cfran/channel.hpp"
#include "cfran/coding2d.hpp"
#include "cfran/icic.hpp"
#include "cfran/orchestrator.hpp"
#include "cfran/thzlink.hpp"

namespace cfran {

/// Parse failure pointing at the offending section, key and line (line 0
/// when the problem is not tied to a line, e.g. a command-line override).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string message, std::string section, std::string key, int line)
      : std::runtime_error(std::move(message)),
        section_(std::move(section)),
        key_(std::move(key)),
        line_(line) {}
  const std::string& section() const { return section_; }
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string section_;
  std::string key_;
  int line_;
};

/// Everything a run can be configured with. Defaults are the documented
/// ones; see README for the key list.
struct RunConfig {
  // [topology]
  std::string layout = "auto";  // auto | icic3 | se12 | custom
  std::vector<Rru> rrus;        // custom layout
  std::vector<Ue> ues;
  std::optional<double> carrier_hz;
  std::optional<double> bandwidth_hz;
  std::optional<int> n_subcarriers;
  std::optional<int> n_prbs;
  std::optional<double> rru_power_dbm;
  FadingProfile fading;

  // [sim]
  SimConfig sim;
  std::vector<double> loads_mbps = {20.0, 85.0, 150.0};

  // [coding2d]
  Code2DConfig coding;
  std::vector<double> coding_ebn0_db = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::int64_t coding_info_bits = 100000;

  // [thz]
  LinkConfig thz;
  std::vector<double> thz_ebn0_db = {4.0, 6.0, 8.0};
  std::int64_t thz_symbols = 1000000;
  double f_tx_signal_hz = 193.4e12;
  double f_tx_lo_hz = 193.0e12;
  double f_rx_lo_hz = 193.1e12;
  double f_if_hz = 20e9;

  // [icic]
  IcicParams icic = IcicParams::defaults();
  int max_colors = 3;

  // [cellfree]
  int n_drops = 100;
  std::vector<double> se_snr_db = {30.0};
  int max_tones = 8;
  int calibration_antennas = 8;
  std::vector<double> calibration_noise = {0.0, 1e-4, 1e-2};
  int calibration_trials = 100;

  /// Topology for a subcommand: the custom layout when RRUs/UEs were given,
  /// otherwise the named preset ("auto" picks icic3 for icic and se12 for
  /// everything else), with grid and power overrides applied.
  Topology topology_for(std::string_view subcommand) const;
};

/// Sectioned key=value text: "[section]" headers, "key = value" lines,
/// '#' or ';' comments. Sections: topology, sim, coding2d, thz, icic,
/// cellfree. List values are comma separated. Repeated "rru"/"ue" keys in
/// [topology] append elements. Unknown sections or keys, malformed values
/// and invariant violations throw ConfigError.
RunConfig parse_config(std::string_view text);

/// Applies one "section.key" = value assignment on top of a parsed config,
/// with the same checks as the file parser.
void apply_override(RunConfig& config, std::string_view dotted_key, std::string_view value);

/// True when the key takes a comma-separated list.
bool is_list_key(std::string_view dotted_key);

}  // namespace cfran
