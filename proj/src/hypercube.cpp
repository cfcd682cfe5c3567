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

#include "hcdiff/hypercube.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hcdiff/errors.hpp"

namespace hcdiff {

namespace {

constexpr double kSumTolerance = 1e-12;

void check_dense_dim(int dim) {
  if (dim < 1 || dim > kMaxDenseDim) {
    throw DimensionError("dense distributions need 1 <= d <= " +
                         std::to_string(kMaxDenseDim) + ", got d=" + std::to_string(dim));
  }
}

void check_same_dim(const DenseDistribution& p, const DenseDistribution& q) {
  if (p.dim() != q.dim()) {
    throw std::invalid_argument("distributions have different dimensions");
  }
}

}  // namespace

HypercubeState::HypercubeState(std::uint64_t bits_, int dim_) : bits(bits_), dim(dim_) {
  if (dim < 1 || dim > kMaxSamplingDim) {
    throw DimensionError("hypercube dimension must be in [1, 63], got " + std::to_string(dim));
  }
  if ((bits >> dim) != 0) {
    throw std::invalid_argument("state word has bits above dimension " + std::to_string(dim));
  }
}

int hamming(HypercubeState a, HypercubeState b) {
  if (a.dim != b.dim) throw std::invalid_argument("hamming: dimension mismatch");
  return std::popcount(a.bits ^ b.bits);
}

DenseDistribution::DenseDistribution(int dim, std::vector<double> mass)
    : dim_(dim), mass_(std::move(mass)) {
  check_dense_dim(dim_);
  if (mass_.size() != (std::size_t{1} << dim_)) {
    throw std::invalid_argument("distribution needs 2^d entries");
  }
  double sum = 0.0;
  for (double m : mass_) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("distribution entries must be finite and nonnegative");
    }
    sum += m;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("distribution mass sums to " + std::to_string(sum) +
                                ", not 1");
  }
}

DenseDistribution DenseDistribution::normalized(int dim, std::vector<double> weights) {
  check_dense_dim(dim);
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("weights sum to zero");
  for (double& w : weights) w /= sum;
  return DenseDistribution(dim, std::move(weights));
}

DenseDistribution DenseDistribution::uniform(int dim) {
  check_dense_dim(dim);
  const std::size_t n = std::size_t{1} << dim;
  return DenseDistribution(dim, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DenseDistribution DenseDistribution::point_mass(HypercubeState x) {
  check_dense_dim(x.dim);
  std::vector<double> mass(std::size_t{1} << x.dim, 0.0);
  mass[x.bits] = 1.0;
  return DenseDistribution(x.dim, std::move(mass));
}

DenseDistribution DenseDistribution::from_samples(int dim,
                                                  std::span<const std::uint64_t> states) {
  check_dense_dim(dim);
  std::vector<double> counts(std::size_t{1} << dim, 0.0);
  for (std::uint64_t s : states) {
    if (s >= counts.size()) throw std::invalid_argument("sample outside the hypercube");
    counts[s] += 1.0;
  }
  return normalized(dim, std::move(counts));
}

double DenseDistribution::at(HypercubeState x) const {
  if (x.dim != dim_) throw std::invalid_argument("state dimension does not match distribution");
  return mass_[x.bits];
}

ScoreVector::ScoreVector(std::vector<double> ratios) : ratios_(std::move(ratios)) {
  for (double r : ratios_) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw std::invalid_argument("score ratios must be finite and nonnegative");
    }
  }
}

double ScoreVector::total() const { return std::accumulate(ratios_.begin(), ratios_.end(), 0.0); }

double flip_probability(double dt) {
  if (!(dt >= 0.0)) throw std::invalid_argument("flip_probability: negative time");
  return -0.5 * std::expm1(-2.0 * dt);
}

double heat_kernel(HypercubeState w, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("heat_kernel: negative time");
  const double differ = flip_probability(t);
  const double same = 1.0 - differ;
  const int k = w.popcount();
  return std::pow(differ, k) * std::pow(same, w.dim - k);
}

DenseDistribution evolve_exact(const DenseDistribution& p0, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("evolve_exact: negative time");
  const double differ = flip_probability(t);
  const double same = 1.0 - differ;
  std::vector<double> p(p0.mass().begin(), p0.mass().end());
  const std::size_t n = p.size();
  for (int i = 0; i < p0.dim(); ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t j = 0; j < n; ++j) {
      if (j & bit) continue;
      const double a = p[j];
      const double b = p[j | bit];
      p[j] = same * a + differ * b;
      p[j | bit] = differ * a + same * b;
    }
  }
  return DenseDistribution(p0.dim(), std::move(p));
}

ScoreVector exact_score(const DenseDistribution& p, HypercubeState x) {
  const double px = p.at(x);
  if (!(px > 0.0)) {
    throw ZeroMassError(x.bits, "exact_score: state " + std::to_string(x.bits) +
                                    " has zero probability");
  }
  std::vector<double> ratios(static_cast<std::size_t>(x.dim));
  for (int i = 0; i < x.dim; ++i) ratios[i] = p.at(x.flipped(i)) / px;
  return ScoreVector(std::move(ratios));
}

double score_envelope(double s_forward, const EnvelopeMode& mode) {
  if (!(s_forward >= 0.0)) throw std::invalid_argument("score_envelope: negative time");
  if (const auto* bounded = std::get_if<BoundedEnvelope>(&mode)) {
    if (!(bounded->L >= 1.0)) {
      throw std::invalid_argument("bounded envelope needs L >= 1");
    }
    if (s_forward == 0.0) return bounded->L;
    return std::min(1.0 / std::tanh(s_forward), bounded->L);
  }
  if (s_forward == 0.0) {
    throw std::domain_error("score_envelope: infinite rate at forward time 0 in general mode");
  }
  return 1.0 / std::tanh(s_forward);
}

double kl(const DenseDistribution& p, const DenseDistribution& q) {
  check_same_dim(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(sum, 0.0);
}

double tv(const DenseDistribution& p, const DenseDistribution& q) {
  check_same_dim(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return std::min(0.5 * sum, 1.0);
}

double entropy(const DenseDistribution& p) {
  double h = 0.0;
  for (double m : p.mass()) {
    if (m > 0.0) h -= m * std::log(m);
  }
  return h;
}

double max_neighbor_ratio(const DenseDistribution& p) {
  double worst = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    for (int i = 0; i < p.dim(); ++i) {
      const double ny = p[x ^ (std::size_t{1} << i)];
      if (ny == 0.0) continue;
      if (p[x] == 0.0) return std::numeric_limits<double>::infinity();
      worst = std::max(worst, ny / p[x]);
    }
  }
  return worst;
}

}  // namespace hcdiff
