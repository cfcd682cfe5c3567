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

// Score-entropy losses: the Bregman divergence of the entropy generator, its
// expectation under p(t), the path-KL identity by quadrature, and Monte-Carlo
// estimators of the implicit and denoising score entropies.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hcdiff/hypercube.hpp"
#include "hcdiff/score.hpp"

namespace hcdiff {

enum class Estimator { exact_quadrature, monte_carlo };

std::string to_string(Estimator e);

struct LossReport {
  double value = 0.0;
  std::size_t n_states_visited = 0;
  std::vector<double> time_points;
  Estimator estimator = Estimator::exact_quadrature;
  /// Monte-Carlo only.
  std::size_t n_samples = 0;
  std::optional<std::uint64_t> seed;
  /// Samples (or quadrature nodes) whose integrand was infinite.
  std::size_t n_infinite = 0;
  /// Set whenever value is not a finite number.
  bool flagged = false;
  /// path_kl only: the two terms of the identity.
  double kl_terminal = 0.0;
  double integral = 0.0;
};

/// l(c, s) = sum_i (-c_i + s_i + c_i log(c_i / s_i)) with 0 log(0/s) = 0.
/// Returns +infinity when some s_i = 0 while c_i > 0.
double bregman(std::span<const double> c, std::span<const double> s);

/// E_{x ~ p_t} l(c_x, s_x(t)), where p_t is the marginal at forward time t
/// and c_x its exact score. Null states are skipped.
double expected_loss_at(const DenseDistribution& p_t, const ScoreFn& score, double t);

/// Nodes and weights for integrating over [a, b] split at breakpoints, each
/// piece carrying a Simpson rule on a grid geometric in t (offset grid when
/// the piece starts at 0). n_per_piece is rounded up to an odd count >= 3.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule loss_quadrature(double a, double b, std::span<const double> breakpoints,
                               std::size_t n_per_piece);

inline constexpr std::size_t kDefaultQuadraturePoints = 129;

/// KL(p(T) || gamma_init) + int_delta^T E_{p(t)} l(c, s) dt.
LossReport path_kl(const DenseDistribution& p0, const ScoreFn& score, double T, double delta,
                   const DenseDistribution& gamma_init,
                   std::size_t n_quad = kDefaultQuadraturePoints);

enum class TimeWeighting { uniform, log_uniform };

/// Time-averaged Bregman error of a score estimate over [delta, T]:
/// uniform weighting divides the integral by T - delta; log-uniform uses the
/// density 1 / (t log(T / delta)).
double average_bregman(const DenseDistribution& p0, const ScoreFn& score, double T, double delta,
                       TimeWeighting weighting, std::size_t n_quad = kDefaultQuadraturePoints);

struct IseSample {
  double t;
  HypercubeState x_t;
};

struct DseSample {
  double t;
  HypercubeState x_0;
  HypercubeState x_t;
};

/// Mean over samples of sum_i [s_{x_t}(t)_i - log s_{x_t ^ e_i}(t)_i].
LossReport ise_estimate(std::span<const IseSample> samples, const ScoreFn& score,
                        std::optional<std::uint64_t> seed = std::nullopt);

/// Mean over samples of sum_i [s_{x_t}(t)_i - r_i log s_{x_t}(t)_i], with
/// r_i = g_{w ^ e_i}(t) / g_w(t), w = x_t ^ x_0.
LossReport dse_estimate(std::span<const DseSample> samples, const ScoreFn& score,
                        std::optional<std::uint64_t> seed = std::nullopt);

/// The heat-kernel quotient g_{w ^ e_i}(t) / g_w(t): a single-coordinate
/// factor, tanh(t) when w_i = 0 and coth(t) when w_i = 1.
double kernel_ratio(bool coordinate_differs, double t);

}  // namespace hcdiff
