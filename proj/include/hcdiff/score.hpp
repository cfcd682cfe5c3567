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

// Score functions: callables returning the d neighbor ratios s_x(t) for a
// state x at FORWARD time t. The reverse sampler queries them at t = T - tau.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hcdiff/hypercube.hpp"

namespace hcdiff {

struct ScoreFn {
  using Eval = std::function<void(HypercubeState x, double t, std::span<double> out)>;

  int dim = 0;
  Eval eval;
  /// Forward times where eval may jump (piecewise-constant tables). The
  /// quadrature and ODE oracles split their grids at these points.
  std::vector<double> breakpoints;

  void operator()(HypercubeState x, double t, std::span<double> out) const { eval(x, t, out); }
  std::vector<double> operator()(HypercubeState x, double t) const {
    std::vector<double> out(static_cast<std::size_t>(dim));
    eval(x, t, out);
    return out;
  }
};

/// True score of p(t) = evolve_exact(p0, t), evaluated in closed form from the
/// heat kernel: O(|supp p0| * d) per query, valid for any t >= 0. Throws
/// ZeroMassError at null states.
ScoreFn exact_score_fn(const DenseDistribution& p0);

/// Every ratio equal to value (value 1 is the exact score of uniform data).
ScoreFn constant_score_fn(int dim, double value);

}  // namespace hcdiff
