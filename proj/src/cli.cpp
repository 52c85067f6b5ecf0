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

#include "cfran/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cfran/cellfree.hpp"
#include "cfran/coding2d.hpp"
#include "cfran/config.hpp"
#include "cfran/orchestrator.hpp"
#include "cfran/rng.hpp"
#include "cfran/thzlink.hpp"

namespace cfran {
namespace {

using nlohmann::json;

struct Outputs {
  std::vector<Table> tables;
  json trace;  // null when the subcommand has no JSON output
};

std::string fmt(double x) { return format_number(x); }
std::string fmt(std::uint64_t x) { return std::to_string(x); }
std::string fmt(int x) { return std::to_string(x); }

json plan_json(const PrbPlan& plan) {
  json j;
  j["n_prbs"] = plan.n_prbs;
  j["edge_fraction"] = plan.edge_fraction;
  j["sets"] = plan.sets;
  j["common_band"] = plan.common_band;
  j["color"] = plan.color;
  std::vector<std::string> cls;
  for (auto c : plan.ue_class) cls.push_back(c == UeClass::kEdge ? "edge" : "center");
  j["ue_class"] = cls;
  j["common_only"] = plan.common_only;
  j["fallback"] = plan.fallback;
  return j;
}

json fds_json(const Fds& fds) {
  json rows = json::array();
  for (Eigen::Index u = 0; u < fds.rsrp.rows(); ++u) {
    std::vector<double> row(fds.rsrp.cols());
    for (Eigen::Index c = 0; c < fds.rsrp.cols(); ++c) row[c] = fds.rsrp(u, c);
    rows.push_back(row);
  }
  return {{"rsrp_dbm", rows}, {"window_start", fds.window_start}, {"window_end", fds.window_end}};
}

Outputs run_icic(const RunConfig& cfg) {
  const Topology topology = cfg.topology_for("icic");
  Table table{"icic.csv", {"mode", "load_mbps", "system_tput_mbps"}, {}};
  for (int u = 0; u < topology.n_ues(); ++u) table.header.push_back("ue" + std::to_string(u) + "_mbps");
  table.header.push_back("seed");
  json runs = json::array();
  for (double load : cfg.loads_mbps) {
    for (IcicMode mode : {IcicMode::kFr, IcicMode::kIcic}) {
      SimConfig sim = cfg.sim;
      sim.offered_load_bps = load * 1e6;
      const SimReport rep = run_icic_experiment(sim, topology, mode, cfg.fading, cfg.icic, cfg.max_colors);
      std::vector<std::string> row{to_string(mode), fmt(load), fmt(rep.system_throughput / 1e6)};
      for (double x : rep.per_ue_throughput) row.push_back(fmt(x / 1e6));
      row.push_back(fmt(rep.seed));
      table.rows.push_back(std::move(row));

      json params = json::array();
      for (const auto& p : rep.params_trace)
        params.push_back({{"delta_db", p.delta_db()}, {"edge_fraction", p.edge_fraction()}, {"q", p.q}});
      runs.push_back({{"mode", to_string(mode)},
                      {"load_mbps", load},
                      {"seed", rep.seed},
                      {"system_tput_bps", rep.system_throughput},
                      {"per_ue_tput_bps", rep.per_ue_throughput},
                      {"per_ue_mean_sinr_db", rep.per_ue_mean_sinr_db},
                      {"time_series_bps", rep.time_series},
                      {"params_trace", params},
                      {"final_plan", plan_json(rep.final_plan)},
                      {"final_fds", fds_json(rep.final_fds)}});
    }
  }
  return {{table}, json{{"runs", runs}}};
}

Outputs run_cellfree_se(const RunConfig& cfg) {
  const Topology topology = cfg.topology_for("cellfree-se");
  Table drops{"cellfree_se.csv", {"snr_db", "drop", "joint_se", "best_single_se", "small_cell_se", "seed"}, {}};
  Table summary{"cellfree_se_summary.csv",
                {"snr_db", "n_drops", "joint_mean", "joint_p10", "joint_p50", "joint_p90",
                 "best_single_mean", "small_cell_mean", "joint_over_best_single", "seed"},
                {}};
  for (double snr : cfg.se_snr_db) {
    const double noise = reference_noise_var(topology, snr);
    const SeStatistics st =
        run_se_experiment(topology, cfg.n_drops, noise, cfg.sim.seed, cfg.fading, cfg.max_tones);
    for (std::size_t d = 0; d < st.joint.size(); ++d)
      drops.rows.push_back({fmt(snr), fmt(static_cast<int>(d)), fmt(st.joint[d]), fmt(st.best_single[d]),
                            fmt(st.small_cell[d]), fmt(cfg.sim.seed)});
    summary.rows.push_back({fmt(snr), fmt(cfg.n_drops), fmt(st.joint_mean), fmt(st.joint_p10),
                            fmt(st.joint_p50), fmt(st.joint_p90), fmt(st.best_single_mean),
                            fmt(st.small_cell_mean), fmt(st.joint_mean / st.best_single_mean),
                            fmt(cfg.sim.seed)});
  }
  return {{drops, summary}, nullptr};
}

Outputs run_coding2d(const RunConfig& cfg) {
  Table table{"coding2d_ber.csv",
              {"ablated", "ebn0_db", "ber", "std_error", "n_bits", "n_errors", "rate", "seed"},
              {}};
  const std::int64_t per_block =
      static_cast<std::int64_t>(cfg.coding.n_info_per_stream) * cfg.coding.n_streams;
  const int n_blocks = static_cast<int>((cfg.coding_info_bits + per_block - 1) / per_block);
  for (bool ablate : {false, true})
    for (double ebn0 : cfg.coding_ebn0_db) {
      const BerResult r = ber_sim(cfg.coding, ebn0, n_blocks, cfg.sim.seed, ablate);
      table.rows.push_back({ablate ? "1" : "0", fmt(ebn0), fmt(r.ber), fmt(r.standard_error()),
                            fmt(r.n_bits), fmt(r.n_errors), fmt(cfg.coding.rate()), fmt(cfg.sim.seed)});
    }
  return {{table}, nullptr};
}

Outputs run_thz(const RunConfig& cfg) {
  Table ber{"thz_ber.csv",
            {"snr_db", "ber", "analytic_ber", "pre_fec_ok", "line_rate", "net_rate", "n_bits",
             "n_errors", "seed"},
            {}};
  for (double snr : cfg.thz_ebn0_db) {
    LinkConfig link = cfg.thz;
    link.snr_db = snr;
    const LinkReport r = simulate_ber(link, cfg.thz_symbols, cfg.sim.seed);
    ber.rows.push_back({fmt(snr), fmt(r.ber), fmt(qpsk_ber(snr)), r.pre_fec_ok ? "1" : "0",
                        fmt(r.line_rate), fmt(r.net_rate), fmt(r.n_bits), fmt(r.n_errors),
                        fmt(cfg.sim.seed)});
  }
  const FrequencyPlan fp = frequency_plan(cfg.f_tx_signal_hz, cfg.f_tx_lo_hz, cfg.f_rx_lo_hz, cfg.f_if_hz);
  Table plan{"thz_plan.csv",
             {"f_tx_signal_hz", "f_tx_lo_hz", "f_thz_hz", "f_if_hz", "f_rx_lo_hz", "f_rx_signal_hz",
              "out_of_band"},
             {{fmt(fp.f_tx_signal), fmt(fp.f_tx_lo), fmt(fp.f_thz), fmt(fp.f_if), fmt(fp.f_rx_lo),
               fmt(fp.f_rx_signal), fp.out_of_band ? "1" : "0"}}};
  return {{ber, plan}, nullptr};
}

Outputs run_calibrate(const RunConfig& cfg) {
  Table table{"calibrate.csv",
              {"noise_var", "n_antennas", "trials", "mean_max_rel_error", "worst_max_rel_error", "seed"},
              {}};
  for (double noise : cfg.calibration_noise) {
    double sum = 0.0, worst = 0.0;
    for (int k = 0; k < cfg.calibration_trials; ++k) {
      const double e = calibration_trial(cfg.calibration_antennas, noise,
                                         derive_seed(cfg.sim.seed, 0x43414c, static_cast<std::uint64_t>(k)));
      sum += e;
      worst = std::max(worst, e);
    }
    table.rows.push_back({fmt(noise), fmt(cfg.calibration_antennas), fmt(cfg.calibration_trials),
                          fmt(sum / cfg.calibration_trials), fmt(worst), fmt(cfg.sim.seed)});
  }
  return {{table}, nullptr};
}

Outputs dispatch(const std::string& sub, const RunConfig& cfg) {
  if (sub == "icic") return run_icic(cfg);
  if (sub == "cellfree-se") return run_cellfree_se(cfg);
  if (sub == "coding2d-ber") return run_coding2d(cfg);
  if (sub == "thz-ber") return run_thz(cfg);
  if (sub == "calibrate") return run_calibrate(cfg);
  throw ConfigError("unknown subcommand '" + sub + "'", "", "", 0);
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.flush()) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string render_csv(const Table& t, const std::string& comment) {
  std::ostringstream os;
  os << "# " << comment << '\n';
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'", "", "", 0);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Splits "section.key=v1,v2" into the key and its values.
std::pair<std::string, std::vector<std::string>> parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("--sweep expects section.key=v1,v2,...", "", "", 0);
  std::pair<std::string, std::vector<std::string>> out{spec.substr(0, eq), {}};
  std::stringstream ss(spec.substr(eq + 1));
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.second.push_back(item);
  if (out.second.empty()) throw ConfigError("--sweep needs at least one value", "", out.first, 0);
  return out;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::vector<std::string> subcommands() {
  return {"icic", "cellfree-se", "coding2d-ber", "thz-ber", "calibrate"};
}

int run(const RunManifest& manifest, std::ostream& log, std::ostream& err) {
  RunConfig cfg;
  std::vector<RunConfig> variants;
  std::string sweep_key;
  std::vector<std::string> sweep_values;
  try {
    if (!manifest.config_path.empty()) cfg = parse_config(read_file(manifest.config_path));
    if (manifest.seed) cfg.sim.seed = *manifest.seed;
    if (!manifest.sweep.empty()) {
      std::tie(sweep_key, sweep_values) = parse_sweep(manifest.sweep);
      if (is_list_key(sweep_key)) {
        std::string joined;
        for (const auto& v : sweep_values) joined += (joined.empty() ? "" : ",") + v;
        apply_override(cfg, sweep_key, joined);
        sweep_key.clear();
      } else {
        for (const auto& v : sweep_values) {
          RunConfig c = cfg;
          apply_override(c, sweep_key, v);
          variants.push_back(std::move(c));
        }
      }
    }
    if (variants.empty()) variants.push_back(cfg);
    const auto subs = subcommands();
    if (std::find(subs.begin(), subs.end(), manifest.subcommand) == subs.end())
      throw ConfigError("unknown subcommand '" + manifest.subcommand + "'", "", "", 0);
  } catch (const ConfigError& e) {
    err << "cfran: config error: " << e.what() << '\n';
    return 1;
  }

  try {
    std::vector<Table> merged;
    json trace;
    for (std::size_t v = 0; v < variants.size(); ++v) {
      Outputs out = dispatch(manifest.subcommand, variants[v]);
      if (!sweep_key.empty()) {
        for (auto& t : out.tables) {
          t.header.insert(t.header.begin(), sweep_key);
          for (auto& r : t.rows) r.insert(r.begin(), sweep_values[v]);
        }
        if (!out.trace.is_null()) trace.push_back({{sweep_key, sweep_values[v]}, {"result", out.trace}});
      } else {
        trace = std::move(out.trace);
      }
      if (merged.empty()) {
        merged = std::move(out.tables);
      } else {
        for (std::size_t i = 0; i < merged.size(); ++i)
          merged[i].rows.insert(merged[i].rows.end(), out.tables[i].rows.begin(), out.tables[i].rows.end());
      }
    }

    std::string dir = manifest.out_dir;
    if (dir.empty()) {
      const char* env = std::getenv(kOutDirEnv);
      dir = env && *env ? env : "out";
    }
    std::filesystem::create_directories(dir);
    std::string comment = "cfran " + manifest.subcommand + " seed=" + std::to_string(cfg.sim.seed) +
                          " version=" + manifest.version;
    if (!manifest.sweep.empty()) comment += " sweep=" + manifest.sweep;
    for (const auto& t : merged) {
      const auto path = std::filesystem::path(dir) / t.file_name;
      write_atomic(path, render_csv(t, comment));
      log << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
    }
    if (!trace.is_null()) {
      const std::string stem = merged.empty() ? manifest.subcommand : std::filesystem::path(merged.front().file_name).stem().string();
      const auto path = std::filesystem::path(dir) / (stem + ".json");
      json doc{{"subcommand", manifest.subcommand},
               {"seed", cfg.sim.seed},
               {"version", manifest.version},
               {"sweep", manifest.sweep},
               {"trace", trace}};
      write_atomic(path, doc.dump(1) + "\n");
      log << "wrote " << path.string() << '\n';
    }
  } catch (const ConfigError& e) {
    err << "cfran: config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "cfran: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Cell-free RAN experiment runner"};
  app.set_version_flag("--version", kVersion);
  RunManifest manifest;
  std::uint64_t seed = 0;
  app.add_option("subcommand", manifest.subcommand, "icic | cellfree-se | coding2d-ber | thz-ber | calibrate")
      ->required();
  app.add_option("--config", manifest.config_path, "Sectioned key=value config file");
  auto* seed_opt = app.add_option("--seed", seed, "Seed, overrides [sim] seed");
  app.add_option("--out", manifest.out_dir, std::string("Output directory (default $") + kOutDirEnv + " or ./out)");
  app.add_option("--sweep", manifest.sweep, "section.key=v1,v2,... ; list keys are replaced, scalar keys run once per value");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) manifest.seed = seed;
  return run(manifest, std::cout, std::cerr);
}

}  // namespace cfran
