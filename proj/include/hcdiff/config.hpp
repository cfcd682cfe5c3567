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

// Experiment configuration. The file is JSON; the schema is documented in
// README.md. Unknown keys are rejected at every level. A run manifest is
// also a valid config: its "config" member is used.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hcdiff/hypercube.hpp"
#include "hcdiff/sampler.hpp"
#include "hcdiff/score.hpp"
#include "hcdiff/score_train.hpp"

namespace hcdiff {

inline constexpr int kConfigSchemaVersion = 1;

struct DataSettings {
  /// point-mass, product-bernoulli, random-dirichlet, two-mode, bounded-ratio
  std::string preset = "point-mass";
  std::uint64_t state = 0;
  double q = 0.3;
  double alpha = 0.5;
  double beta = 1.0;
  double L = 3.0;
  std::uint64_t seed = 0;
};

struct ScoreSource {
  /// exact, table-file, perturbed
  std::string source = "exact";
  std::string path;
  double sigma = 0.1;
  std::uint64_t seed = 0;
  std::size_t buckets = 16;
};

struct TrainSettings {
  std::size_t n_pairs = 100000;
  std::size_t buckets = 16;
  SgdParams sgd;
};

struct OracleSettings {
  /// Compare sampled laws against the dense reverse ODE (d <= 12).
  bool ode_check = true;
  std::size_t steps_per_unit = 2000;
};

struct ExperimentConfig {
  int d = 4;
  double T = 6.0;
  double delta = 0.05;
  double c = 1.0;
  double C = 2.0;
  /// "general" or "bounded"; bounded uses L.
  std::string mode = "general";
  double L = 3.0;
  std::uint64_t seed = 0;
  std::size_t n_samples = 10000;

  DataSettings data;
  ScoreSource score;
  TrainSettings train;
  OracleSettings oracle;
  std::size_t n_quad = 129;
  std::vector<double> evolve_times{0.0, 0.1, 0.5, 1.0, 2.0};
  std::string output_dir = "hcdiff_out";

  SamplerConfig sampler_config() const;
  TrainConfig train_config() const;
  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
/// Fully resolved form (every field present); config_from_json inverts it.
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the resolved config's canonical dump without the output
/// section, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

DenseDistribution make_data(const ExperimentConfig& config);
/// The configured score source for data p0 (exact or perturbed need p0;
/// table-file reads the table from disk).
ScoreFn make_score(const ExperimentConfig& config, const DenseDistribution& p0);

}  // namespace hcdiff
