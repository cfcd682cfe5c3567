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

// States, distributions and the independent-flip forward process on {0,1}^d.
//
// Indexing convention shared by every module: entry i of a distribution is
// the probability of the state whose bit word equals i (bit j = coordinate j).

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace hcdiff {

inline constexpr int kMaxSamplingDim = 63;
inline constexpr int kMaxDenseDim = 24;

/// A vertex of the hypercube.
struct HypercubeState {
  std::uint64_t bits = 0;
  int dim = 1;

  HypercubeState() = default;
  HypercubeState(std::uint64_t bits_, int dim_);

  bool bit(int i) const { return ((bits >> i) & 1u) != 0; }
  HypercubeState flipped(int i) const { return {bits ^ (std::uint64_t{1} << i), dim}; }
  int popcount() const { return std::popcount(bits); }

  friend bool operator==(const HypercubeState&, const HypercubeState&) = default;
};

/// Hamming distance; both states must share a dimension.
int hamming(HypercubeState a, HypercubeState b);

/// Full probability vector over the 2^d states.
class DenseDistribution {
 public:
  /// Validates nonnegativity and that the entries sum to 1 within 1e-12.
  DenseDistribution(int dim, std::vector<double> mass);

  /// Scales nonnegative weights to unit mass. This is the only place
  /// normalization drift is corrected.
  static DenseDistribution normalized(int dim, std::vector<double> weights);
  static DenseDistribution uniform(int dim);
  static DenseDistribution point_mass(HypercubeState x);
  /// Plug-in estimate from observed state words.
  static DenseDistribution from_samples(int dim, std::span<const std::uint64_t> states);

  int dim() const { return dim_; }
  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }
  double at(HypercubeState x) const;
  std::span<const double> mass() const { return mass_; }

 private:
  int dim_;
  std::vector<double> mass_;
};

/// Neighbor probability ratios [p_{x^e_1}/p_x, ..., p_{x^e_d}/p_x].
class ScoreVector {
 public:
  ScoreVector() = default;
  explicit ScoreVector(std::vector<double> ratios);

  std::size_t size() const { return ratios_.size(); }
  double operator[](std::size_t i) const { return ratios_[i]; }
  std::span<const double> ratios() const { return ratios_; }
  double total() const;

 private:
  std::vector<double> ratios_;
};

/// Probability that one coordinate differs after running the forward
/// process for dt: (1 - e^{-2 dt}) / 2.
double flip_probability(double dt);

/// Discrete heat kernel g_w(t) = 2^{-d} prod_i (1 + (-1)^{w_i} e^{-2t}).
double heat_kernel(HypercubeState w, double t);

/// p0 pushed forward by the independent-flip process for time t.
/// Runs d in-place coordinate passes, O(d 2^d).
DenseDistribution evolve_exact(const DenseDistribution& p0, double t);

/// Throws ZeroMassError if p_x == 0.
ScoreVector exact_score(const DenseDistribution& p, HypercubeState x);

struct GeneralEnvelope {};
struct BoundedEnvelope {
  double L;
};
using EnvelopeMode = std::variant<GeneralEnvelope, BoundedEnvelope>;

/// Per-coordinate bound on neighbor ratios of p(s): coth(s) in general mode,
/// min(coth(s), L) when the data ratios are bounded by L.
double score_envelope(double s_forward, const EnvelopeMode& mode);

/// Returns +infinity when p is not absolutely continuous w.r.t. q.
double kl(const DenseDistribution& p, const DenseDistribution& q);
double tv(const DenseDistribution& p, const DenseDistribution& q);
/// Shannon entropy in nats.
double entropy(const DenseDistribution& p);

/// Largest neighbor ratio over positive-mass states with positive-mass
/// neighbors; infinity if some neighbor of a null state has mass.
double max_neighbor_ratio(const DenseDistribution& p);

}  // namespace hcdiff
