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

// Tabular score learning by denoising score entropy, plus utilities that turn
// tables and perturbations into ScoreFn values.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "hcdiff/errors.hpp"
#include "hcdiff/hypercube.hpp"
#include "hcdiff/losses.hpp"
#include "hcdiff/rng.hpp"
#include "hcdiff/score.hpp"

namespace hcdiff {

/// Partition of a forward-time range into buckets [e_b, e_{b+1}); the last
/// bucket also contains its right edge.
class TimeBuckets {
 public:
  explicit TimeBuckets(std::vector<double> edges);
  /// Geometric edges from lo to hi. With lo == 0 the first bucket is
  /// [0, 1e-3 hi] and the remaining B - 1 are geometric up to hi.
  static TimeBuckets geometric(double lo, double hi, std::size_t count);

  std::size_t count() const { return edges_.size() - 1; }
  double lo() const { return edges_.front(); }
  double hi() const { return edges_.back(); }
  std::span<const double> edges() const { return edges_; }
  /// Interior edges, i.e. the times where a table lookup may jump.
  std::vector<double> interior() const;

  /// Throws std::out_of_range when t lies outside [lo, hi].
  std::size_t locate(double t) const;
  /// Geometric midpoint (arithmetic for a bucket starting at 0).
  double midpoint(std::size_t b) const;

 private:
  std::vector<double> edges_;
};

/// Log-scores theta[b][x][i] stored row-major with shape (B, 2^d, d).
class ScoreTable {
 public:
  ScoreTable(int dim, TimeBuckets buckets, double initial_log_score = 0.0);
  ScoreTable(int dim, TimeBuckets buckets, std::vector<double> theta);

  int dim() const { return dim_; }
  const TimeBuckets& buckets() const { return buckets_; }
  std::span<const double> theta() const { return theta_; }
  std::span<double> theta() { return theta_; }

  std::size_t index(std::size_t bucket, std::uint64_t state, int coordinate) const {
    return (bucket * (std::size_t{1} << dim_) + state) * static_cast<std::size_t>(dim_) +
           static_cast<std::size_t>(coordinate);
  }

 private:
  int dim_;
  TimeBuckets buckets_;
  std::vector<double> theta_;
};

struct TrainConfig {
  int d = 3;
  double T = 4.0;
  double delta = 0.05;
  std::size_t buckets = 16;
};

struct SgdParams {
  double learning_rate = 0.05;
  /// Learning rate decays geometrically to this value over the epochs.
  double final_learning_rate = 1e-3;
  std::size_t epochs = 30;
  std::size_t batch_size = 128;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainReport {
  double final_dse = 0.0;
  std::size_t iterations = 0;
  std::vector<double> learning_rates;
  std::uint64_t seed = 0;
  std::size_t n_pairs = 0;
  /// Empirical DSE after each epoch.
  std::vector<double> epoch_loss;
  /// per_bucket_loss[epoch][bucket]; NaN for buckets with no pairs.
  std::vector<std::vector<double>> per_bucket_loss;
  /// DSE of the table composed with clamp_score, and the total score mass
  /// the clamp removed, both over the training pairs.
  double clamped_dse = 0.0;
  double clamp_removed_mass = 0.0;
};

class TrainingError : public NumericalError {
 public:
  TrainingError(const std::string& what, TrainReport report)
      : NumericalError(what), report_(std::move(report)) {}
  const TrainReport& report() const { return report_; }

 private:
  TrainReport report_;
};

using DataSampler = std::function<HypercubeState(Rng&)>;

/// Pairs (t, X_0, X_t): t log-uniform on [delta, T], X_0 from the data
/// sampler, X_t from the forward kernel.
std::vector<DseSample> generate_dse_pairs(const DataSampler& data, const TrainConfig& config,
                                          std::size_t n_pairs, std::uint64_t seed);

/// Empirical DSE of the table over pairs (mean per pair).
double dse_objective(const ScoreTable& table, std::span<const DseSample> pairs);
/// Gradient of dse_objective w.r.t. theta: (1/n) sum (e^theta - r) per entry.
std::vector<double> dse_gradient(const ScoreTable& table, std::span<const DseSample> pairs);

/// Minibatch SGD with per-entry Adam scaling on the empirical DSE.
std::pair<ScoreTable, TrainReport> train_tabular(const DataSampler& data, const TrainConfig& config,
                                                 std::size_t n_pairs, const SgdParams& sgd,
                                                 std::uint64_t seed);

/// Same, on a fixed set of pairs.
std::pair<ScoreTable, TrainReport> train_on_pairs(std::span<const DseSample> pairs,
                                                  const TrainConfig& config, const SgdParams& sgd,
                                                  std::uint64_t seed);

/// Piecewise-constant lookup; queries outside the bucket range throw.
ScoreFn table_as_score_fn(const ScoreTable& table);

/// Table holding score evaluated at every bucket midpoint.
ScoreTable table_from_score_fn(const ScoreFn& score, const TimeBuckets& buckets);

/// base multiplied by independent lognormal factors exp(noise_level * z),
/// with z fixed per (bucket, state, coordinate) by seed. d <= 16.
ScoreFn perturb_score(const ScoreFn& base, double noise_level, std::uint64_t seed,
                      const TimeBuckets& buckets);

}  // namespace hcdiff
