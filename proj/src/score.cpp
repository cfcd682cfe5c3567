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

#include "hcdiff/score.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "hcdiff/errors.hpp"

namespace hcdiff {

namespace {

struct SupportEntry {
  std::uint64_t state;
  double mass;
};

}  // namespace

ScoreFn exact_score_fn(const DenseDistribution& p0) {
  auto support = std::make_shared<std::vector<SupportEntry>>();
  for (std::size_t i = 0; i < p0.size(); ++i) {
    if (p0[i] > 0.0) support->push_back({i, p0[i]});
  }
  const int d = p0.dim();
  ScoreFn fn;
  fn.dim = d;
  fn.eval = [support, d](HypercubeState x, double t, std::span<double> out) {
    if (!(t >= 0.0)) throw std::invalid_argument("exact score queried at negative time");
    const double differ = flip_probability(t);
    const double same = 1.0 - differ;
    // kernel[k] = g_w(t) for any w with popcount k; padded so k-1 and k+1 are valid.
    std::array<double, kMaxSamplingDim + 3> kernel{};
    for (int k = 0; k <= d; ++k) kernel[k + 1] = std::pow(differ, k) * std::pow(same, d - k);
    double px = 0.0;
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& [a, m] : *support) {
      const std::uint64_t w = x.bits ^ a;
      const int k = std::popcount(w);
      px += m * kernel[k + 1];
      const double down = m * kernel[k];      // neighbor one flip closer to a
      const double up = m * kernel[k + 2];    // neighbor one flip further from a
      for (int i = 0; i < d; ++i) out[i] += ((w >> i) & 1u) ? down : up;
    }
    if (!(px > 0.0)) {
      throw ZeroMassError(x.bits, "exact score: state " + std::to_string(x.bits) +
                                      " has zero mass at t=" + std::to_string(t));
    }
    for (double& r : out) r /= px;
  };
  return fn;
}

ScoreFn constant_score_fn(int dim, double value) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("constant score must be finite and nonnegative");
  }
  ScoreFn fn;
  fn.dim = dim;
  fn.eval = [value](HypercubeState, double, std::span<double> out) {
    std::fill(out.begin(), out.end(), value);
  };
  return fn;
}

}  // namespace hcdiff
