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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cfran {

inline constexpr const char* kVersion = "0.1.0";

/// Environment variable that overrides the default output directory.
inline constexpr const char* kOutDirEnv = "CFRAN_OUT_DIR";

struct RunManifest {
  std::string subcommand;  // icic | cellfree-se | coding2d-ber | thz-ber | calibrate
  std::string config_path;  // empty: defaults only
  std::optional<std::uint64_t> seed;  // overrides [sim] seed
  std::string out_dir;  // empty: $CFRAN_OUT_DIR, then "out"
  std::string sweep;  // "section.key=v1,v2,..." or empty
  std::string version = kVersion;
};

/// One CSV file: header row plus pre-formatted cells.
struct Table {
  std::string file_name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// "%.6g".
std::string format_number(double x);

std::vector<std::string> subcommands();

/// Runs one subcommand and writes its files. Returns 0 on success, 1 on a
/// config error, 2 on a runtime error; messages go to `log` and `err`.
int run(const RunManifest& manifest, std::ostream& log, std::ostream& err);

/// Command-line front end: cfran SUBCOMMAND [--config PATH] [--seed N]
/// [--out DIR] [--sweep section.key=v1,v2,...].
int cli_main(int argc, char** argv);

}  // namespace cfran
