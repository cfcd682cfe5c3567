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

#include "hcdiff/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "hcdiff/errors.hpp"

namespace hcdiff::oracle {

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr double kClipTolerance = 1e-12;
constexpr double kNegativeMassAbort = -1e-8;

double inf_norm(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t r = 0; r < m.n(); ++r) {
    double sum = 0.0;
    for (double v : m.row(r)) sum += std::abs(v);
    worst = std::max(worst, sum);
  }
  return worst;
}

void check_size(std::size_t n) {
  if (n == 0 || n > kMaxStates) {
    throw DimensionError("oracle matrices support 1..4096 states, got " + std::to_string(n));
  }
}

// Forward time for a reverse-time query, kept inside [lo, hi) so that
// piecewise-constant scores are read from the bucket the current piece covers.
GeneratorFn reverse_generator_on(const ScoreFn& score, double T, double lo, double hi) {
  const int d = score.dim;
  if (d < 1 || d > 12) throw DimensionError("reverse generator needs 1 <= d <= 12");
  const std::size_t n = std::size_t{1} << d;
  return [score, T, lo, hi, d, n](double tau) {
    double t = T - tau;
    if (hi > lo) t = std::clamp(t, lo, std::nextafter(hi, lo));
    t = std::max(t, 0.0);
    Matrix off(n);
    std::vector<double> ratios(static_cast<std::size_t>(d));
    for (std::size_t x = 0; x < n; ++x) {
      score(HypercubeState(x, d), t, ratios);
      for (int i = 0; i < d; ++i) off(x, x ^ (std::size_t{1} << i)) = ratios[i];
    }
    return GeneratorMatrix::from_off_diagonal(std::move(off));
  };
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.n() != b.n()) throw std::invalid_argument("matrix size mismatch");
  const std::size_t n = a.n();
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

GeneratorMatrix::GeneratorMatrix(Matrix rates) : rates_(std::move(rates)) {
  check_size(rates_.n());
  for (std::size_t r = 0; r < rates_.n(); ++r) {
    double sum = 0.0;
    double scale = 0.0;
    for (std::size_t c = 0; c < rates_.n(); ++c) {
      const double v = rates_(r, c);
      if (!std::isfinite(v)) throw std::invalid_argument("generator entries must be finite");
      if (c != r && v < 0.0) throw std::invalid_argument("generator off-diagonals must be >= 0");
      sum += v;
      scale += std::abs(v);
    }
    if (std::abs(sum) > kRowSumTolerance * std::max(1.0, scale)) {
      throw std::invalid_argument("generator row " + std::to_string(r) + " sums to " +
                                  std::to_string(sum));
    }
  }
}

GeneratorMatrix GeneratorMatrix::from_off_diagonal(Matrix rates) {
  for (std::size_t r = 0; r < rates.n(); ++r) {
    double exit = 0.0;
    for (std::size_t c = 0; c < rates.n(); ++c) {
      if (c != r) exit += rates(r, c);
    }
    rates(r, r) = -exit;
  }
  return GeneratorMatrix(std::move(rates));
}

GeneratorMatrix GeneratorMatrix::hypercube(int dim) {
  if (dim < 1 || dim > 12) throw DimensionError("hypercube generator needs 1 <= d <= 12");
  const std::size_t n = std::size_t{1} << dim;
  Matrix off(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (int i = 0; i < dim; ++i) off(x, x ^ (std::size_t{1} << i)) = 1.0;
  }
  return from_off_diagonal(std::move(off));
}

double GeneratorMatrix::max_exit_rate() const {
  double worst = 0.0;
  for (std::size_t x = 0; x < n(); ++x) worst = std::max(worst, -rates_(x, x));
  return worst;
}

Matrix expm(const GeneratorMatrix& q, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("expm: negative time");
  const std::size_t n = q.n();
  Matrix a(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a(r, c) = t * q(r, c);
  }
  const double norm = inf_norm(a);
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const double scale = std::ldexp(1.0, -squarings);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a(r, c) *= scale;
  }

  // Taylor series; with ||a|| <= 1/2 the terms fall below 1e-18 well before k = 30.
  Matrix result = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int k = 1; k <= 30; ++k) {
    term = term * a;
    const double inv_k = 1.0 / k;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        term(r, c) *= inv_k;
        result(r, c) += term(r, c);
      }
    }
    if (inf_norm(term) < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;

  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      double& v = result(r, c);
      if (v < 0.0) {
        if (v < -kClipTolerance) throw NumericalError("expm produced a negative entry");
        v = 0.0;
      }
    }
  }
  return result;
}

std::vector<double> propagate(std::span<const double> p, const Matrix& m) {
  if (p.size() != m.n()) throw std::invalid_argument("vector/matrix size mismatch");
  std::vector<double> out(m.n(), 0.0);
  for (std::size_t r = 0; r < m.n(); ++r) {
    const double pr = p[r];
    if (pr == 0.0) continue;
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.n(); ++c) out[c] += pr * row[c];
  }
  return out;
}

DenseDistribution Marginal::to_distribution(int dim) const {
  std::vector<double> w(mass);
  for (double& v : w) v = std::max(v, 0.0);
  return DenseDistribution::normalized(dim, std::move(w));
}

Marginal integrate_forward(const GeneratorFn& q_of_t, std::span<const double> p0, double t0,
                           double t1, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("integrate_forward: steps must be >= 1");
  if (!(t1 >= t0)) throw std::invalid_argument("integrate_forward: t1 < t0");
  check_size(p0.size());
  const double h = (t1 - t0) / static_cast<double>(steps);
  std::vector<double> p(p0.begin(), p0.end());
  const std::size_t n = p.size();
  std::vector<double> stage(n);

  auto derivative = [&](double t, std::span<const double> x) {
    const GeneratorMatrix q = q_of_t(t);
    if (q.n() != n) throw std::invalid_argument("generator size does not match distribution");
    return propagate(x, q.rates());
  };

  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + h * static_cast<double>(s);
    const auto k1 = derivative(t, p);
    for (std::size_t i = 0; i < n; ++i) stage[i] = p[i] + 0.5 * h * k1[i];
    const auto k2 = derivative(t + 0.5 * h, stage);
    for (std::size_t i = 0; i < n; ++i) stage[i] = p[i] + 0.5 * h * k2[i];
    const auto k3 = derivative(t + 0.5 * h, stage);
    for (std::size_t i = 0; i < n; ++i) stage[i] = p[i] + h * k3[i];
    const auto k4 = derivative(t + h, stage);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(p[i]) || p[i] < kNegativeMassAbort) {
        throw NumericalError("integrate_forward: mass " + std::to_string(p[i]) + " at state " +
                             std::to_string(i) + ", t=" + std::to_string(t + h) +
                             "; step size too coarse");
      }
    }
  }

  Marginal out;
  double sum = 0.0;
  out.min_entry = std::numeric_limits<double>::infinity();
  for (double v : p) {
    sum += v;
    out.min_entry = std::min(out.min_entry, v);
  }
  out.mass_drift = sum - 1.0;
  out.mass = std::move(p);
  return out;
}

std::size_t uniformize_generic(const GeneratorFn& q_of_t, double lambda_bound,
                               std::span<const double> p0, double T, Rng& rng) {
  if (!(lambda_bound > 0.0)) throw std::invalid_argument("lambda_bound must be positive");
  if (!(T >= 0.0)) throw std::invalid_argument("uniformize_generic: negative horizon");

  std::size_t state = p0.size() - 1;
  {
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t i = 0; i < p0.size(); ++i) {
      cum += p0[i];
      if (u < cum) {
        state = i;
        break;
      }
    }
  }

  std::poisson_distribution<std::uint64_t> poisson(lambda_bound * T);
  const std::uint64_t m = lambda_bound * T > 0.0 ? poisson(rng) : 0;
  std::vector<double> times(m);
  for (double& tau : times) tau = T * rng.uniform();
  std::sort(times.begin(), times.end());

  for (double tau : times) {
    const GeneratorMatrix q = q_of_t(tau);
    const double exit = q.max_exit_rate();
    if (exit > lambda_bound * (1.0 + 1e-12)) {
      throw RateBoundError(state, tau, 0, exit, lambda_bound);
    }
    const double target = rng.uniform() * lambda_bound;
    double cum = 0.0;
    for (std::size_t y = 0; y < q.n(); ++y) {
      if (y == state) continue;
      cum += q(state, y);
      if (target < cum) {
        state = y;
        break;
      }
    }
  }
  return state;
}

GeneratorFn three_state_example() {
  return [](double t) {
    Matrix off(3);
    off(0, 1) = 1.0 + 0.5 * std::sin(3.0 * t);
    off(0, 2) = 0.5;
    off(1, 0) = 0.3 + 0.2 * t;
    off(1, 2) = 1.2 * std::cos(t) * std::cos(t);
    off(2, 0) = 0.8;
    off(2, 1) = 0.4 + 0.4 * std::sin(2.0 * t) * std::sin(2.0 * t);
    return GeneratorMatrix::from_off_diagonal(std::move(off));
  };
}

GeneratorFn reverse_generator(const ScoreFn& score, double T) {
  return reverse_generator_on(score, T, 0.0, 0.0);
}

Marginal reverse_marginal(const ScoreFn& score, const DenseDistribution& init, double T,
                          double delta, std::size_t steps_per_unit) {
  if (!(delta >= 0.0 && T > delta)) throw std::invalid_argument("reverse_marginal: need 0 <= delta < T");
  if (init.dim() != score.dim) throw std::invalid_argument("reverse_marginal: dimension mismatch");
  // Forward-time knots, descending from T to delta.
  std::vector<double> knots{T};
  std::vector<double> inner;
  for (double b : score.breakpoints) {
    if (b > delta && b < T) inner.push_back(b);
  }
  std::sort(inner.begin(), inner.end(), std::greater<>());
  inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
  knots.insert(knots.end(), inner.begin(), inner.end());
  knots.push_back(delta);

  std::vector<double> p(init.mass().begin(), init.mass().end());
  Marginal out;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double hi = knots[k];
    const double lo = knots[k + 1];
    const auto steps = static_cast<std::size_t>(
        std::max(1.0, std::ceil((hi - lo) * static_cast<double>(steps_per_unit))));
    out = integrate_forward(reverse_generator_on(score, T, lo, hi), p, T - hi, T - lo, steps);
    p = out.mass;
  }
  return out;
}

}  // namespace hcdiff::oracle
