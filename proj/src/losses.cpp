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

#include "hcdiff/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hcdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LossIntegral {
  double value = 0.0;
  std::vector<double> nodes;
  std::size_t n_infinite = 0;
  std::size_t n_states_visited = 0;
};

// int_delta^T weight(t) E_{p(t)} l(c, s) dt on the rule from loss_quadrature.
template <typename Weight>
LossIntegral integrate_loss(const DenseDistribution& p0, const ScoreFn& score, double T,
                            double delta, std::size_t n_quad, Weight weight) {
  if (!(delta >= 0.0 && T > delta)) throw std::invalid_argument("need 0 <= delta < T");
  if (n_quad < 2) throw std::invalid_argument("n_quad must be >= 2");
  if (score.dim != p0.dim()) throw std::invalid_argument("score dimension mismatch");
  const QuadratureRule rule = loss_quadrature(delta, T, score.breakpoints, n_quad);
  LossIntegral out;
  out.nodes = rule.nodes;
  std::vector<bool> visited(p0.size(), false);
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double t = rule.nodes[j];
    const DenseDistribution pt = evolve_exact(p0, t);
    for (std::size_t x = 0; x < pt.size(); ++x) {
      if (pt[x] > 0.0) visited[x] = true;
    }
    const double f = expected_loss_at(pt, score, t);
    if (!std::isfinite(f)) ++out.n_infinite;
    out.value += rule.weights[j] * weight(t) * f;
  }
  out.n_states_visited = static_cast<std::size_t>(std::count(visited.begin(), visited.end(), true));
  return out;
}

}  // namespace

std::string to_string(Estimator e) {
  return e == Estimator::exact_quadrature ? "exact_quadrature" : "monte_carlo";
}

double bregman(std::span<const double> c, std::span<const double> s) {
  if (c.size() != s.size()) throw std::invalid_argument("bregman: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i] >= 0.0) || !(s[i] >= 0.0)) throw std::invalid_argument("bregman: negative ratio");
    if (c[i] == 0.0) {
      sum += s[i];
    } else if (s[i] == 0.0) {
      return kInf;
    } else {
      sum += s[i] - c[i] + c[i] * std::log(c[i] / s[i]);
    }
  }
  // Each term is nonnegative in exact arithmetic; the clamp only removes
  // cancellation noise when s is within rounding of c.
  return std::max(sum, 0.0);
}

double expected_loss_at(const DenseDistribution& p_t, const ScoreFn& score, double t) {
  if (score.dim != p_t.dim()) throw std::invalid_argument("score dimension mismatch");
  const int d = p_t.dim();
  std::vector<double> c(static_cast<std::size_t>(d));
  std::vector<double> s(static_cast<std::size_t>(d));
  double total = 0.0;
  for (std::size_t x = 0; x < p_t.size(); ++x) {
    const double px = p_t[x];
    if (px == 0.0) continue;
    for (int i = 0; i < d; ++i) c[i] = p_t[x ^ (std::size_t{1} << i)] / px;
    score(HypercubeState(x, d), t, s);
    const double l = bregman(c, s);
    if (!std::isfinite(l)) return kInf;
    total += px * l;
  }
  return total;
}

QuadratureRule loss_quadrature(double a, double b, std::span<const double> breakpoints,
                               std::size_t n_per_piece) {
  if (!(b > a) || !(a >= 0.0)) throw std::invalid_argument("quadrature needs 0 <= a < b");
  std::size_t n = std::max<std::size_t>(n_per_piece, 3);
  if (n % 2 == 0) ++n;

  std::vector<double> knots{a};
  for (double bp : breakpoints) {
    if (bp > a && bp < b) knots.push_back(bp);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  knots.push_back(b);

  QuadratureRule rule;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double lo = knots[k];
    const double hi = knots[k + 1];
    // t(u) = lo + sigma (e^u - 1), u in [0, U]: geometric in t when lo > 0.
    const double sigma = lo > 0.0 ? lo : 1e-3 * hi;
    const double U = std::log1p((hi - lo) / sigma);
    const double h = U / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      const double u = h * static_cast<double>(j);
      const double simpson = (j == 0 || j == n - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      const double t = j == n - 1 ? hi : lo + sigma * std::expm1(u);
      rule.nodes.push_back(t);
      rule.weights.push_back(simpson * h / 3.0 * sigma * std::exp(u));
    }
  }
  return rule;
}

LossReport path_kl(const DenseDistribution& p0, const ScoreFn& score, double T, double delta,
                   const DenseDistribution& gamma_init, std::size_t n_quad) {
  const LossIntegral integral = integrate_loss(p0, score, T, delta, n_quad, [](double) { return 1.0; });
  LossReport report;
  report.estimator = Estimator::exact_quadrature;
  report.kl_terminal = kl(evolve_exact(p0, T), gamma_init);
  report.integral = integral.value;
  report.value = report.kl_terminal + report.integral;
  report.time_points = integral.nodes;
  report.n_states_visited = integral.n_states_visited;
  report.n_infinite = integral.n_infinite;
  report.flagged = !std::isfinite(report.value);
  return report;
}

double average_bregman(const DenseDistribution& p0, const ScoreFn& score, double T, double delta,
                       TimeWeighting weighting, std::size_t n_quad) {
  if (weighting == TimeWeighting::uniform) {
    const auto integral = integrate_loss(p0, score, T, delta, n_quad, [](double) { return 1.0; });
    return integral.value / (T - delta);
  }
  if (!(delta > 0.0)) throw std::invalid_argument("log-uniform weighting needs delta > 0");
  const double norm = std::log(T / delta);
  const auto integral = integrate_loss(p0, score, T, delta, n_quad,
                                       [norm](double t) { return 1.0 / (t * norm); });
  return integral.value;
}

double kernel_ratio(bool coordinate_differs, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("kernel_ratio needs t > 0");
  const double differ = flip_probability(t);
  const double same = 1.0 - differ;
  return coordinate_differs ? same / differ : differ / same;
}

namespace {

LossReport finish_mc(double sum, std::size_t n, std::size_t n_infinite,
                     std::optional<std::uint64_t> seed, std::vector<double> times,
                     std::size_t visited) {
  LossReport report;
  report.estimator = Estimator::monte_carlo;
  report.n_samples = n;
  report.seed = seed;
  report.n_infinite = n_infinite;
  report.value = n_infinite > 0 ? kInf : (n > 0 ? sum / static_cast<double>(n) : 0.0);
  report.flagged = !std::isfinite(report.value);
  report.time_points = std::move(times);
  report.n_states_visited = visited;
  return report;
}

}  // namespace

LossReport ise_estimate(std::span<const IseSample> samples, const ScoreFn& score,
                        std::optional<std::uint64_t> seed) {
  const int d = score.dim;
  std::vector<double> s(static_cast<std::size_t>(d));
  std::vector<double> s_neighbor(static_cast<std::size_t>(d));
  double sum = 0.0;
  std::size_t n_infinite = 0;
  std::vector<double> times;
  times.reserve(samples.size());
  for (const auto& [t, x] : samples) {
    times.push_back(t);
    score(x, t, s);
    double term = 0.0;
    bool infinite = false;
    for (int i = 0; i < d; ++i) {
      score(x.flipped(i), t, s_neighbor);
      if (!(s_neighbor[i] > 0.0)) {
        infinite = true;
        break;
      }
      term += s[i] - std::log(s_neighbor[i]);
    }
    if (infinite) {
      ++n_infinite;
    } else {
      sum += term;
    }
  }
  return finish_mc(sum, samples.size(), n_infinite, seed, std::move(times), samples.size());
}

LossReport dse_estimate(std::span<const DseSample> samples, const ScoreFn& score,
                        std::optional<std::uint64_t> seed) {
  const int d = score.dim;
  std::vector<double> s(static_cast<std::size_t>(d));
  double sum = 0.0;
  std::size_t n_infinite = 0;
  std::vector<double> times;
  times.reserve(samples.size());
  for (const auto& sample : samples) {
    times.push_back(sample.t);
    score(sample.x_t, sample.t, s);
    const std::uint64_t w = sample.x_t.bits ^ sample.x_0.bits;
    const double tanh_t = kernel_ratio(false, sample.t);
    const double coth_t = kernel_ratio(true, sample.t);
    double term = 0.0;
    bool infinite = false;
    for (int i = 0; i < d; ++i) {
      if (!(s[i] > 0.0)) {
        infinite = true;
        break;
      }
      const double r = ((w >> i) & 1u) ? coth_t : tanh_t;
      term += s[i] - r * std::log(s[i]);
    }
    if (infinite) {
      ++n_infinite;
    } else {
      sum += term;
    }
  }
  return finish_mc(sum, samples.size(), n_infinite, seed, std::move(times), samples.size());
}

}  // namespace hcdiff
