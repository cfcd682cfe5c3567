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

// Exact simulation of the reverse (sampling) CTMC by uniformization with an
// adaptive time partition: on each reverse-time interval a Poisson clock of
// rate lambda_k dominates every exit rate, and each tick moves x -> x ^ e_i
// with probability s_x(T - tau)_i / lambda_k or stays put.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hcdiff/hypercube.hpp"
#include "hcdiff/rng.hpp"
#include "hcdiff/score.hpp"

namespace hcdiff {

struct SamplerConfig {
  int d = 4;
  double T = 6.0;
  /// Early-stopping time; the sampler returns the law at reverse time T - delta.
  double delta = 0.05;
  /// Partition constant: t_{k+1} - t_k <= c (T - t_{k+1}).
  double c = 1.0;
  /// Rate multiplier for the final interval in bounded mode.
  double C = 2.0;
  EnvelopeMode mode = GeneralEnvelope{};
  std::uint64_t seed = 0;
  std::size_t n_samples = 1;

  void validate() const;
};

struct TimePartition {
  /// Reverse times 0 = t_0 < ... < t_N = T - delta.
  std::vector<double> times;
  double c = 1.0;
  double T = 0.0;
  double delta = 0.0;
  /// Bounded mode: the last interval is [T - 1/L, T - delta] and is exempt
  /// from the partition inequality.
  bool bounded_tail = false;

  std::size_t intervals() const { return times.size() - 1; }
  /// Checks t_{k+1} - t_k <= c (T - t_{k+1}) on every non-tail interval.
  bool satisfies_partition_inequality() const;
};

struct LambdaSchedule {
  /// lambdas[k] is the rate on [t_k, t_{k+1}].
  std::vector<double> lambdas;
  /// sum_k lambda_k (t_{k+1} - t_k): the mean number of clock ticks.
  double total_mass = 0.0;
};

struct TrajectoryStats {
  std::uint64_t n_events = 0;
  std::uint64_t n_flips = 0;
  std::vector<std::uint64_t> per_interval_events;
};

struct Trajectory {
  HypercubeState state;
  TrajectoryStats stats;
};

/// Clock ticks of one trajectory, sorted within each interval.
struct EventTimes {
  std::vector<std::vector<double>> per_interval;
};

TimePartition build_partition(const SamplerConfig& config);
LambdaSchedule build_lambda_schedule(const TimePartition& partition, const SamplerConfig& config);

/// Wraps score so that the per-state total at forward time t never exceeds
/// d * score_envelope(t, mode); larger totals are scaled down proportionally.
ScoreFn clamp_score(const ScoreFn& score, const SamplerConfig& config);

class ReverseSampler {
 public:
  explicit ReverseSampler(SamplerConfig config);

  const SamplerConfig& config() const { return config_; }
  const TimePartition& partition() const { return partition_; }
  const LambdaSchedule& schedule() const { return schedule_; }

  /// Throws RateBoundError if some score row total exceeds the interval rate.
  Trajectory sample(const ScoreFn& score, Rng& rng) const;

  /// The two halves of sample(): draw the Poisson clock, then run the chain
  /// on those ticks from a uniform start.
  EventTimes draw_event_times(Rng& rng) const;
  Trajectory run_on_events(const ScoreFn& score, const EventTimes& events, Rng& rng) const;

 private:
  SamplerConfig config_;
  TimePartition partition_;
  LambdaSchedule schedule_;
};

Trajectory sample_reverse(const SamplerConfig& config, const ScoreFn& score, Rng& rng);

struct SampleRecord {
  std::uint64_t state = 0;
  std::uint64_t n_events = 0;
  std::uint64_t n_flips = 0;
};

/// n trajectories; trajectory i uses Rng(seed, i), so the result does not
/// depend on the worker count.
std::vector<SampleRecord> sample_batch(const ReverseSampler& sampler, const ScoreFn& score,
                                       std::uint64_t seed, std::size_t n, unsigned workers = 1);

/// X_t given X_0 = x0: each coordinate flips independently with
/// flip_probability(t).
HypercubeState sample_forward_conditional(HypercubeState x0, double t, Rng& rng);

struct FlipEvent {
  double time;
  int coordinate;
};

struct ForwardPath {
  std::vector<FlipEvent> events;
  HypercubeState final_state;
};

/// Homogeneous forward CTMC on [0, t_max]: every coordinate carries its own
/// rate-1 flip clock.
ForwardPath sample_forward_path(HypercubeState x0, double t_max, Rng& rng);

}  // namespace hcdiff
