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

#include "cfran/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>

namespace cfran {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Setters throw std::invalid_argument with a short reason; the caller adds
// section, key and line.
double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size())
    throw std::invalid_argument("expected a number");
  return v;
}

double to_finite(std::string_view s) {
  const double v = to_double(s);
  if (!std::isfinite(v)) throw std::invalid_argument("expected a finite number");
  return v;
}

double to_positive(std::string_view s) {
  const double v = to_finite(s);
  if (!(v > 0.0)) throw std::invalid_argument("must be positive");
  return v;
}

std::int64_t to_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size())
    throw std::invalid_argument("expected an integer");
  return v;
}

int to_count(std::string_view s, int minimum = 1) {
  const std::int64_t v = to_int(s);
  if (v < minimum || v > 1'000'000'000)
    throw std::invalid_argument("must be an integer >= " + std::to_string(minimum));
  return static_cast<int>(v);
}

std::uint64_t to_seed(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size())
    throw std::invalid_argument("expected a non-negative integer");
  return v;
}

// Accepts "0.25" or "1/4".
double to_fraction(std::string_view s) {
  const auto parts = split(s, '/');
  if (parts.size() == 1) return to_finite(parts[0]);
  if (parts.size() != 2) throw std::invalid_argument("expected a number or a/b");
  const double den = to_finite(parts[1]);
  if (den == 0.0) throw std::invalid_argument("zero denominator");
  return to_finite(parts[0]) / den;
}

std::vector<double> to_list(std::string_view s) {
  std::vector<double> out;
  for (auto item : split(s, ',')) out.push_back(to_double(item));
  if (out.empty()) throw std::invalid_argument("expected at least one value");
  return out;
}

Rru to_rru(std::string_view s) {
  const auto f = split(s, ',');
  if (f.size() < 3 || f.size() > 5)
    throw std::invalid_argument("expected x, y, n_antennas[, tx_power_dbm[, edu]]");
  Rru r;
  r.position = {to_finite(f[0]), to_finite(f[1])};
  r.n_antennas = to_count(f[2]);
  if (f.size() > 3) r.tx_power_dbm = to_finite(f[3]);
  if (f.size() > 4) r.edu_id = to_count(f[4], 0);
  return r;
}

Ue to_ue(std::string_view s) {
  const auto f = split(s, ',');
  if (f.size() < 4 || f.size() > 5)
    throw std::invalid_argument("expected x, y, n_antennas, serving_cell[, tx_power_dbm]");
  Ue u;
  u.position = {to_finite(f[0]), to_finite(f[1])};
  u.n_antennas = to_count(f[2]);
  u.serving_cell = to_count(f[3], 0);
  if (f.size() > 4) u.tx_power_dbm = to_finite(f[4]);
  return u;
}

// Moves the current ICIC action to the grid point matching the request.
void select_action(IcicParams& p, double delta_db, double edge_fraction) {
  for (std::size_t i = 0; i < p.actions.size(); ++i)
    if (std::abs(p.actions[i].delta_db - delta_db) < 1e-9 &&
        std::abs(p.actions[i].edge_fraction - edge_fraction) < 1e-9) {
      p.current = static_cast<int>(i);
      return;
    }
  throw std::invalid_argument("not on the action grid");
}

struct KeySpec {
  bool list = false;
  std::function<void(RunConfig&, std::string_view)> set;
};

using Registry = std::map<std::string, std::map<std::string, KeySpec, std::less<>>, std::less<>>;

const Registry& registry() {
  static const Registry reg = [] {
    Registry r;
    auto& topo = r["topology"];
    topo["layout"] = {false, [](RunConfig& c, std::string_view v) {
      const std::string s(trim(v));
      if (s != "auto" && s != "icic3" && s != "se12" && s != "custom")
        throw std::invalid_argument("expected auto, icic3, se12 or custom");
      c.layout = s;
    }};
    topo["rru"] = {false, [](RunConfig& c, std::string_view v) { c.rrus.push_back(to_rru(v)); }};
    topo["ue"] = {false, [](RunConfig& c, std::string_view v) { c.ues.push_back(to_ue(v)); }};
    topo["carrier_hz"] = {false, [](RunConfig& c, std::string_view v) { c.carrier_hz = to_positive(v); }};
    topo["bandwidth_hz"] = {false, [](RunConfig& c, std::string_view v) { c.bandwidth_hz = to_positive(v); }};
    topo["n_subcarriers"] = {false, [](RunConfig& c, std::string_view v) { c.n_subcarriers = to_count(v); }};
    topo["n_prbs"] = {false, [](RunConfig& c, std::string_view v) { c.n_prbs = to_count(v); }};
    topo["rru_power_dbm"] = {false, [](RunConfig& c, std::string_view v) { c.rru_power_dbm = to_finite(v); }};
    topo["n_taps"] = {false, [](RunConfig& c, std::string_view v) { c.fading.n_taps = to_count(v); }};
    topo["delay_decay"] = {false, [](RunConfig& c, std::string_view v) {
      const double d = to_finite(v);
      if (d < 0.0) throw std::invalid_argument("must be non-negative");
      c.fading.delay_decay = d;
    }};
    topo["fading_seed"] = {false, [](RunConfig& c, std::string_view v) { c.fading.seed = to_seed(v); }};

    auto& sim = r["sim"];
    sim["seed"] = {false, [](RunConfig& c, std::string_view v) { c.sim.seed = to_seed(v); }};
    sim["tti_s"] = {false, [](RunConfig& c, std::string_view v) { c.sim.tti_s = to_positive(v); }};
    sim["near_rt_period"] = {false, [](RunConfig& c, std::string_view v) { c.sim.near_rt_period = to_count(v); }};
    sim["non_rt_period"] = {false, [](RunConfig& c, std::string_view v) { c.sim.non_rt_period = to_count(v); }};
    sim["duration"] = {false, [](RunConfig& c, std::string_view v) { c.sim.duration = to_count(v); }};
    sim["loads_mbps"] = {true, [](RunConfig& c, std::string_view v) {
      auto loads = to_list(v);
      for (double l : loads)
        if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("loads must be finite and >= 0");
      c.loads_mbps = std::move(loads);
    }};
    sim["link_adaptation_cap"] = {false, [](RunConfig& c, std::string_view v) { c.sim.link_adaptation_cap = to_positive(v); }};
    sim["noise_figure_db"] = {false, [](RunConfig& c, std::string_view v) { c.sim.noise_figure_db = to_finite(v); }};
    sim["noise_density_dbm_hz"] = {false, [](RunConfig& c, std::string_view v) { c.sim.noise_density_dbm_hz = to_finite(v); }};

    auto& cod = r["coding2d"];
    cod["n_info"] = {false, [](RunConfig& c, std::string_view v) { c.coding.n_info_per_stream = to_count(v); }};
    cod["n_streams"] = {false, [](RunConfig& c, std::string_view v) { c.coding.n_streams = to_count(v); }};
    cod["iterations"] = {false, [](RunConfig& c, std::string_view v) { c.coding.decoder_iterations = to_count(v); }};
    cod["ebn0_db"] = {true, [](RunConfig& c, std::string_view v) { c.coding_ebn0_db = to_list(v); }};
    cod["info_bits"] = {false, [](RunConfig& c, std::string_view v) { c.coding_info_bits = to_count(v); }};

    auto& thz = r["thz"];
    thz["baud"] = {false, [](RunConfig& c, std::string_view v) { c.thz.baud = to_positive(v); }};
    thz["polarizations"] = {false, [](RunConfig& c, std::string_view v) { c.thz.polarizations = to_count(v); }};
    thz["bits_per_symbol"] = {false, [](RunConfig& c, std::string_view v) { c.thz.bits_per_symbol_per_pol = to_count(v); }};
    thz["mimo_channel"] = {false, [](RunConfig& c, std::string_view v) {
      const auto x = to_list(v);
      if (x.size() != 8) throw std::invalid_argument("expected 8 numbers: re,im of h00 h01 h10 h11");
      for (int k = 0; k < 4; ++k) c.thz.mimo_channel(k / 2, k % 2) = {x[2 * k], x[2 * k + 1]};
    }};
    thz["ebn0_db"] = {true, [](RunConfig& c, std::string_view v) { c.thz_ebn0_db = to_list(v); }};
    thz["n_symbols"] = {false, [](RunConfig& c, std::string_view v) { c.thz_symbols = to_count(v, 10000); }};
    thz["fec_threshold"] = {false, [](RunConfig& c, std::string_view v) {
      const double t = to_finite(v);
      if (!(t > 0.0 && t < 0.5)) throw std::invalid_argument("must lie in (0, 0.5)");
      c.thz.fec_threshold = t;
    }};
    auto overhead = [](double& field) {
      return [&field](std::string_view v) {
        const double o = to_finite(v);
        if (!(o >= 0.0 && o < 1.0)) throw std::invalid_argument("must lie in [0, 1)");
        field = o;
      };
    };
    thz["fec_overhead"] = {false, [overhead](RunConfig& c, std::string_view v) { overhead(c.thz.fec_overhead)(v); }};
    thz["total_overhead"] = {false, [overhead](RunConfig& c, std::string_view v) { overhead(c.thz.total_overhead)(v); }};
    thz["f_tx_signal_hz"] = {false, [](RunConfig& c, std::string_view v) { c.f_tx_signal_hz = to_positive(v); }};
    thz["f_tx_lo_hz"] = {false, [](RunConfig& c, std::string_view v) { c.f_tx_lo_hz = to_positive(v); }};
    thz["f_rx_lo_hz"] = {false, [](RunConfig& c, std::string_view v) { c.f_rx_lo_hz = to_positive(v); }};
    thz["f_if_hz"] = {false, [](RunConfig& c, std::string_view v) { c.f_if_hz = to_positive(v); }};

    auto& icic = r["icic"];
    icic["delta_db"] = {false, [](RunConfig& c, std::string_view v) {
      select_action(c.icic, to_finite(v), c.icic.edge_fraction());
    }};
    icic["edge_fraction"] = {false, [](RunConfig& c, std::string_view v) {
      select_action(c.icic, c.icic.delta_db(), to_fraction(v));
    }};
    icic["epsilon"] = {false, [](RunConfig& c, std::string_view v) {
      const double e = to_finite(v);
      if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("must lie in [0, 1]");
      c.icic.epsilon = e;
    }};
    icic["alpha"] = {false, [](RunConfig& c, std::string_view v) {
      const double a = to_finite(v);
      if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("must lie in [0, 1]");
      c.icic.alpha = a;
    }};
    icic["max_colors"] = {false, [](RunConfig& c, std::string_view v) { c.max_colors = to_count(v); }};

    auto& cf = r["cellfree"];
    cf["n_drops"] = {false, [](RunConfig& c, std::string_view v) { c.n_drops = to_count(v); }};
    cf["snr_db"] = {true, [](RunConfig& c, std::string_view v) { c.se_snr_db = to_list(v); }};
    cf["max_tones"] = {false, [](RunConfig& c, std::string_view v) { c.max_tones = to_count(v); }};
    cf["calibration_antennas"] = {false, [](RunConfig& c, std::string_view v) { c.calibration_antennas = to_count(v, 2); }};
    cf["calibration_noise"] = {true, [](RunConfig& c, std::string_view v) {
      auto x = to_list(v);
      for (double n : x)
        if (!(n >= 0.0) || !std::isfinite(n)) throw std::invalid_argument("noise must be finite and >= 0");
      c.calibration_noise = std::move(x);
    }};
    cf["calibration_trials"] = {false, [](RunConfig& c, std::string_view v) { c.calibration_trials = to_count(v); }};
    return r;
  }();
  return reg;
}

const KeySpec& lookup(std::string_view section, std::string_view key, int line) {
  const auto& reg = registry();
  const auto s = reg.find(section);
  if (s == reg.end())
    throw ConfigError("unknown section [" + std::string(section) + "]" +
                          (line > 0 ? ", line " + std::to_string(line) : std::string()),
                      std::string(section), std::string(key), line);
  const auto k = s->second.find(key);
  if (k == s->second.end())
    throw ConfigError("unknown key '" + std::string(key) + "' in [" + std::string(section) + "]" +
                          (line > 0 ? ", line " + std::to_string(line) : std::string()),
                      std::string(section), std::string(key), line);
  return k->second;
}

void assign(RunConfig& config, std::string_view section, std::string_view key,
            std::string_view value, int line) {
  const KeySpec& spec = lookup(section, key, line);
  try {
    spec.set(config, value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("bad value '" + std::string(value) + "' for key '" + std::string(key) +
                          "' in [" + std::string(section) + "]" +
                          (line > 0 ? ", line " + std::to_string(line) : std::string()) + ": " +
                          e.what(),
                      std::string(section), std::string(key), line);
  }
}

// Cross-key invariants, reported against the last line of the section.
void check_invariants(const RunConfig& config, const std::map<std::string, int>& last_line) {
  auto guard = [&](const char* section, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      const auto it = last_line.find(section);
      const int line = it == last_line.end() ? 0 : it->second;
      throw ConfigError("invalid [" + std::string(section) + "] settings" +
                            (line > 0 ? " (line " + std::to_string(line) + ")" : std::string()) +
                            ": " + e.what(),
                        section, "", line);
    }
  };
  guard("sim", [&] { config.sim.validate(); });
  guard("coding2d", [&] { config.coding.validate(); });
  guard("icic", [&] { config.icic.validate(); });
  guard("thz", [&] {
    if (config.thz.polarizations != 2 || config.thz.bits_per_symbol_per_pol != 2)
      throw std::invalid_argument("only dual-polarization QPSK (2, 2) is simulated");
    frequency_plan(config.f_tx_signal_hz, config.f_tx_lo_hz, config.f_rx_lo_hz, config.f_if_hz);
  });
  guard("topology", [&] {
    if (config.layout == "custom" && config.rrus.empty())
      throw std::invalid_argument("custom layout needs rru and ue lines");
    config.topology_for("icic").validate();
    config.topology_for("cellfree-se").validate();
  });
}

}  // namespace

Topology RunConfig::topology_for(std::string_view subcommand) const {
  Topology t;
  if (!rrus.empty() || layout == "custom") {
    if (layout != "auto" && layout != "custom")
      throw std::invalid_argument("rru/ue lines require layout = custom or auto");
    t.rrus = rrus;
    t.ues = ues;
  } else if (layout == "icic3" || (layout == "auto" && subcommand == "icic")) {
    t = icic_layout();
  } else {
    t = se_layout();
  }
  if (carrier_hz) t.carrier_hz = *carrier_hz;
  if (bandwidth_hz) t.bandwidth_hz = *bandwidth_hz;
  if (n_subcarriers) t.n_subcarriers = *n_subcarriers;
  if (n_prbs) t.n_prbs = *n_prbs;
  if (rru_power_dbm)
    for (auto& r : t.rrus) r.tx_power_dbm = *rru_power_dbm;
  return t;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::string section;
  std::map<std::string, int> last_line;
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
      line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header, line " + std::to_string(line_no), "", "", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!registry().contains(section))
        throw ConfigError("unknown section [" + section + "], line " + std::to_string(line_no),
                          section, "", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected key = value, line " + std::to_string(line_no), section, "", line_no);
    const auto key = trim(line.substr(0, eq));
    if (section.empty())
      throw ConfigError("key '" + std::string(key) + "' outside any section, line " +
                            std::to_string(line_no),
                        "", std::string(key), line_no);
    assign(config, section, key, trim(line.substr(eq + 1)), line_no);
    last_line[section] = line_no;
  }
  check_invariants(config, last_line);
  return config;
}

void apply_override(RunConfig& config, std::string_view dotted_key, std::string_view value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string_view::npos)
    throw ConfigError("override key '" + std::string(dotted_key) + "' must be section.key", "",
                      std::string(dotted_key), 0);
  assign(config, dotted_key.substr(0, dot), dotted_key.substr(dot + 1), value, 0);
  check_invariants(config, {});
}

bool is_list_key(std::string_view dotted_key) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string_view::npos) return false;
  return lookup(dotted_key.substr(0, dot), dotted_key.substr(dot + 1), 0).list;
}

}  // namespace cfran
