// Copyright 2026 The hcdiff Authors
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

// The five driver commands. Each writes its outputs plus manifest.json into
// the output directory; on failure every file it created is removed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hcdiff/config.hpp"
#include "hcdiff/verify.hpp"

namespace hcdiff {

inline constexpr const char* kVersion = "0.1.0";
/// Overrides the configured output directory (the --out flag wins over it).
inline constexpr const char* kOutDirEnv = "HCDIFF_OUT_DIR";

struct CommandOptions {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  /// 0 picks the hardware concurrency.
  unsigned workers = 0;
  Profile profile = Profile::full;
};

struct CommandResult {
  int exit_code = 0;
  std::filesystem::path out_dir;
  std::vector<std::string> files;
  /// Human-readable lines for the terminal.
  std::vector<std::string> summary;
  nlohmann::json manifest;
};

/// Loads the config (defaults when no path is given) and applies --seed and
/// the output-directory overrides.
ExperimentConfig resolve_config(const CommandOptions& options);

CommandResult cmd_evolve(const CommandOptions& options);
CommandResult cmd_sample(const CommandOptions& options);
CommandResult cmd_train(const CommandOptions& options);
CommandResult cmd_loss(const CommandOptions& options);
/// Runs the acceptance suite; exit_code is 1 if any criterion fails.
CommandResult cmd_verify(const CommandOptions& options);

}  // namespace hcdiff
