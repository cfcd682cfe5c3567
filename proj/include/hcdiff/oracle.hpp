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

// Brute-force ground truth for small chains: dense matrix exponential,
// fixed-step RK4 on the Kolmogorov forward equation, and a uniformization
// sampler for arbitrary dense generators. Nothing here shares code with the
// hypercube fast paths it is used to check.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hcdiff/hypercube.hpp"
#include "hcdiff/rng.hpp"
#include "hcdiff/score.hpp"

namespace hcdiff::oracle {

inline constexpr std::size_t kMaxStates = std::size_t{1} << 12;

/// Dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
  static Matrix identity(std::size_t n);

  std::size_t n() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * n_, n_}; }

  friend Matrix operator*(const Matrix& a, const Matrix& b);

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Rate matrix: nonnegative off-diagonals, rows summing to zero within 1e-12.
class GeneratorMatrix {
 public:
  explicit GeneratorMatrix(Matrix rates);
  /// Fills the diagonal so that every row sums to zero.
  static GeneratorMatrix from_off_diagonal(Matrix rates);
  /// The independent-flip generator on {0,1}^d (rate 1 to every neighbor).
  static GeneratorMatrix hypercube(int dim);

  std::size_t n() const { return rates_.n(); }
  double operator()(std::size_t r, std::size_t c) const { return rates_(r, c); }
  const Matrix& rates() const { return rates_; }
  /// max_x |Q_{x,x}|
  double max_exit_rate() const;

 private:
  Matrix rates_;
};

using GeneratorFn = std::function<GeneratorMatrix(double t)>;

/// e^{tQ} by scaling and squaring of a truncated Taylor series. Entries
/// below zero by at most 1e-12 are clipped to zero.
Matrix expm(const GeneratorMatrix& q, double t);

/// Row vector times matrix.
std::vector<double> propagate(std::span<const double> p, const Matrix& m);

struct Marginal {
  std::vector<double> mass;
  /// sum(mass) - 1 at the end of integration; reported, not corrected.
  double mass_drift = 0.0;
  double min_entry = 0.0;

  /// Explicitly renormalized hypercube distribution (requires 2^d entries).
  DenseDistribution to_distribution(int dim) const;
};

/// Classic RK4 on dp/dt = p Q(t) over [t0, t1] with a fixed number of steps.
/// Throws NumericalError when any entry drops below -1e-8.
Marginal integrate_forward(const GeneratorFn& q_of_t, std::span<const double> p0, double t0,
                           double t1, std::size_t steps);

/// One draw from p(T) by uniformization: Poisson(lambda_bound * T) events at
/// sorted uniform times, each applying the kernel I + Q(tau)/lambda_bound.
/// Throws when some |Q_{x,x}(tau)| exceeds lambda_bound.
std::size_t uniformize_generic(const GeneratorFn& q_of_t, double lambda_bound,
                               std::span<const double> p0, double T, Rng& rng);

/// A three-state chain with smoothly time-varying rates; every exit rate
/// stays below 2.5 on [0, 2].
GeneratorFn three_state_example();

/// Dense sampling generator at REVERSE time tau: rate s_x(T - tau)_i from x
/// to x ^ e_i. Evaluates the score on all 2^d states per call.
GeneratorFn reverse_generator(const ScoreFn& score, double T);

/// Law of the sampling dynamic at reverse time T - delta, started from
/// init, integrated with RK4 at steps_per_unit steps per unit time and with
/// step boundaries aligned to the score's breakpoints.
Marginal reverse_marginal(const ScoreFn& score, const DenseDistribution& init, double T,
                          double delta, std::size_t steps_per_unit = 2000);

}  // namespace hcdiff::oracle
