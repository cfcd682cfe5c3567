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

#include "hcdiff/presets.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

namespace hcdiff::presets {

DenseDistribution point_mass(int d, std::uint64_t state) {
  return DenseDistribution::point_mass(HypercubeState(state, d));
}

DenseDistribution product_bernoulli(int d, double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("product_bernoulli needs q in [0, 1]");
  std::vector<double> w(std::size_t{1} << d);
  for (std::size_t x = 0; x < w.size(); ++x) {
    const int k = std::popcount(x);
    w[x] = std::pow(q, k) * std::pow(1.0 - q, d - k);
  }
  return DenseDistribution::normalized(d, std::move(w));
}

DenseDistribution random_dirichlet(int d, double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("Dirichlet concentration must be positive");
  Rng rng(seed, 0x6469726963ull);
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> w(std::size_t{1} << d);
  for (double& v : w) v = gamma(rng);
  return DenseDistribution::normalized(d, std::move(w));
}

DenseDistribution two_mode(int d, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("two_mode needs beta >= 0");
  std::vector<double> w(std::size_t{1} << d);
  for (std::size_t x = 0; x < w.size(); ++x) {
    const int k = std::popcount(x);
    w[x] = std::exp(-beta * k) + std::exp(-beta * (d - k));
  }
  return DenseDistribution::normalized(d, std::move(w));
}

DenseDistribution bounded_ratio(int d, double L, std::uint64_t seed) {
  if (!(L >= 1.0)) throw std::invalid_argument("bounded_ratio needs L >= 1");
  Rng rng(seed, 0x626f756e64ull);
  const double log_l = std::log(L);
  std::vector<double> w(std::size_t{1} << d);
  for (double& v : w) v = std::exp(log_l * rng.uniform());
  return DenseDistribution::normalized(d, std::move(w));
}

std::function<HypercubeState(Rng&)> sampler_for(const DenseDistribution& p) {
  auto cumulative = std::make_shared<std::vector<double>>(p.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    (*cumulative)[i] = acc;
  }
  const int d = p.dim();
  return [cumulative, d](Rng& rng) {
    const double u = rng.uniform() * cumulative->back();
    auto it = std::upper_bound(cumulative->begin(), cumulative->end(), u);
    if (it == cumulative->end()) --it;
    return HypercubeState(static_cast<std::uint64_t>(it - cumulative->begin()), d);
  };
}

}  // namespace hcdiff::presets
