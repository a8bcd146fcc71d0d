// Copyright 2026 The oarlab Authors
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


#ifndef OARLAB_RUN_HPP
#define OARLAB_RUN_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oarlab/config.hpp"

namespace oarlab {

/// Environment variable naming the directory under which run directories are created.
inline constexpr const char* kRunRootVariable = "OARLAB_RUN_ROOT";

/// Content hash of the sources this binary was built from.
std::string code_hash();

std::string sha256_file(const std::filesystem::path& path);

/// $OARLAB_RUN_ROOT, or "runs" under the working directory.
std::filesystem::path run_root();

/// Run directory name derived from the command and the settings that distinguish runs.
std::string run_name(const RunConfig& config, const std::string& command);

/// A run directory: manifest, config snapshot, checkpoints/, logs/, reports/.
class RunDirectory {
 public:
  /// Creates the layout and the config snapshot. An existing directory is
  /// emptied first so reruns start fresh. A null config skips the snapshot.
  RunDirectory(std::filesystem::path root, std::string command, const RunConfig* config);

  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
  [[nodiscard]] std::filesystem::path checkpoints() const { return path_ / "checkpoints"; }
  [[nodiscard]] std::filesystem::path logs() const { return path_ / "logs"; }
  [[nodiscard]] std::filesystem::path reports() const { return path_ / "reports"; }

  /// Records an input artifact (for example the warm-start checkpoint) by checksum.
  void add_input(const std::string& role, const std::filesystem::path& path);

  /// Writes manifest.json listing every file below the run directory with its checksum.
  void finalize() const;

 private:
  std::filesystem::path path_;
  std::string command_;
  std::optional<RunConfig> config_;
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
};

/// Parsed manifest.json of a finished run.
nlohmann::json read_manifest(const std::filesystem::path& run_directory);

/// Location of the checkpoint named by a path to a file or a run directory.
std::filesystem::path resolve_checkpoint(const std::filesystem::path& path, const std::string& preferred);

}  // namespace oarlab

#endif  // OARLAB_RUN_HPP
