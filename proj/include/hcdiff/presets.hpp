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

// Named data distributions used by the CLI and the verification suite.

#include <cstdint>
#include <functional>

#include "hcdiff/hypercube.hpp"
#include "hcdiff/rng.hpp"

namespace hcdiff::presets {

DenseDistribution point_mass(int d, std::uint64_t state = 0);
/// Independent coordinates, each equal to 1 with probability q.
DenseDistribution product_bernoulli(int d, double q);
/// Flat Dirichlet(alpha) draw over all 2^d states.
DenseDistribution random_dirichlet(int d, double alpha, std::uint64_t seed);
/// p_x proportional to e^{-beta |x|} + e^{-beta (d - |x|)}: bumps at 0...0 and 1...1.
DenseDistribution two_mode(int d, double beta);
/// p_x proportional to e^{u_x} with u_x uniform on [0, log L], so every
/// neighbor ratio is at most L.
DenseDistribution bounded_ratio(int d, double L, std::uint64_t seed);

/// Categorical sampler over the states of p.
std::function<HypercubeState(Rng&)> sampler_for(const DenseDistribution& p);

}  // namespace hcdiff::presets
