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

#include "hcdiff/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "hcdiff/errors.hpp"
#include "hcdiff/parallel.hpp"

namespace hcdiff {

namespace {

// Row totals may exceed lambda by accumulated rounding when a score sits
// exactly on its envelope (e.g. the exact score of a point mass).
constexpr double kRateSlack = 1e-9;

const BoundedEnvelope* bounded(const SamplerConfig& config) {
  return std::get_if<BoundedEnvelope>(&config.mode);
}

}  // namespace

void SamplerConfig::validate() const {
  if (d < 1 || d > kMaxSamplingDim) {
    throw DimensionError("sampler dimension must be in [1, 63], got " + std::to_string(d));
  }
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive");
  if (!(delta >= 0.0) || !(T > delta)) throw ConfigError("need 0 <= delta < T");
  if (!(c > 0.0)) throw ConfigError("partition constant c must be positive");
  if (!(C > 0.0)) throw ConfigError("rate constant C must be positive");
  if (const auto* b = bounded(*this)) {
    if (!(b->L >= 1.0) || !std::isfinite(b->L)) {
      throw ConfigError("bounded mode needs a finite L >= 1");
    }
  } else if (delta == 0.0) {
    throw ConfigError("delta = 0 is only allowed in bounded mode (rates are unbounded)");
  }
}

bool TimePartition::satisfies_partition_inequality() const {
  const std::size_t checked = bounded_tail ? intervals() - 1 : intervals();
  for (std::size_t k = 0; k < checked; ++k) {
    const double step = times[k + 1] - times[k];
    const double remaining = T - times[k + 1];
    if (!(step > 0.0)) return false;
    // Relative slack for the subtraction T - t.
    if (step > c * remaining * (1.0 + 1e-12) + 1e-15 * T) return false;
  }
  return true;
}

TimePartition build_partition(const SamplerConfig& config) {
  config.validate();
  TimePartition part;
  part.c = config.c;
  part.T = config.T;
  part.delta = config.delta;

  double floor = config.delta;
  if (const auto* b = bounded(config)) {
    if (config.delta < 1.0 / b->L) {
      floor = 1.0 / b->L;
      part.bounded_tail = true;
    }
  }

  // Remaining forward times s_k = T - t_k, shrinking geometrically to floor.
  std::vector<double> remaining{config.T};
  while (remaining.back() > floor) {
    remaining.push_back(std::max(floor, remaining.back() / (1.0 + config.c)));
  }
  if (part.bounded_tail) remaining.push_back(config.delta);

  part.times.reserve(remaining.size());
  for (double s : remaining) part.times.push_back(config.T - s);
  part.times.front() = 0.0;
  part.times.back() = config.T - config.delta;
  return part;
}

LambdaSchedule build_lambda_schedule(const TimePartition& partition, const SamplerConfig& config) {
  if (partition.times.size() < 2) throw std::invalid_argument("partition needs at least one interval");
  LambdaSchedule schedule;
  const std::size_t n = partition.intervals();
  schedule.lambdas.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double dt = partition.times[k + 1] - partition.times[k];
    double lambda;
    if (partition.bounded_tail && k + 1 == n) {
      lambda = config.C * config.d * std::get<BoundedEnvelope>(config.mode).L;
    } else {
      // Envelope at the right endpoint bounds the whole interval.
      lambda = config.d * score_envelope(partition.T - partition.times[k + 1], config.mode);
    }
    schedule.lambdas.push_back(lambda);
    schedule.total_mass += lambda * dt;
  }
  return schedule;
}

ScoreFn clamp_score(const ScoreFn& score, const SamplerConfig& config) {
  if (score.dim != config.d) throw std::invalid_argument("clamp_score: dimension mismatch");
  ScoreFn out;
  out.dim = score.dim;
  out.breakpoints = score.breakpoints;
  out.eval = [score, mode = config.mode, d = config.d](HypercubeState x, double t,
                                                        std::span<double> ratios) {
    score(x, t, ratios);
    const double cap = d * score_envelope(t, mode);
    double total = 0.0;
    for (double r : ratios) total += r;
    if (total > cap) {
      const double scale = cap / total;
      for (double& r : ratios) r *= scale;
    }
  };
  return out;
}

ReverseSampler::ReverseSampler(SamplerConfig config)
    : config_(std::move(config)),
      partition_(build_partition(config_)),
      schedule_(build_lambda_schedule(partition_, config_)) {}

EventTimes ReverseSampler::draw_event_times(Rng& rng) const {
  EventTimes events;
  events.per_interval.resize(partition_.intervals());
  for (std::size_t k = 0; k < partition_.intervals(); ++k) {
    const double t0 = partition_.times[k];
    const double t1 = partition_.times[k + 1];
    std::poisson_distribution<std::uint64_t> poisson(schedule_.lambdas[k] * (t1 - t0));
    auto& times = events.per_interval[k];
    times.resize(poisson(rng));
    for (double& tau : times) tau = t0 + (t1 - t0) * rng.uniform();
    std::sort(times.begin(), times.end());
  }
  return events;
}

Trajectory ReverseSampler::run_on_events(const ScoreFn& score, const EventTimes& events,
                                         Rng& rng) const {
  const int d = config_.d;
  if (score.dim != d) throw std::invalid_argument("score dimension does not match sampler");
  if (events.per_interval.size() != partition_.intervals()) {
    throw std::invalid_argument("event times do not match the partition");
  }
  const std::uint64_t mask = d == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1;
  std::uint64_t state = rng() & mask;

  Trajectory out;
  out.stats.per_interval_events.resize(partition_.intervals());
  std::vector<double> ratios(static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < partition_.intervals(); ++k) {
    const double lambda = schedule_.lambdas[k];
    const auto& times = events.per_interval[k];
    out.stats.per_interval_events[k] = times.size();
    out.stats.n_events += times.size();
    for (double tau : times) {
      const double t_forward = std::max(config_.T - tau, config_.delta);
      score(HypercubeState(state, d), t_forward, ratios);
      double total = 0.0;
      for (double r : ratios) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
          throw RateBoundError(state, tau, k, r, lambda);
        }
        total += r;
      }
      if (total > lambda * (1.0 + kRateSlack)) throw RateBoundError(state, tau, k, total, lambda);
      // One uniform against the cumulative row [s_1, ..., s_d, rest] scaled by
      // lambda: coordinate i fires iff target < s_1 + ... + s_i.
      const double target = rng.uniform() * lambda;
      double cum = 0.0;
      for (int i = 0; i < d; ++i) {
        cum += ratios[i];
        if (target < cum) {
          state ^= std::uint64_t{1} << i;
          ++out.stats.n_flips;
          break;
        }
      }
    }
  }
  out.state = HypercubeState(state, d);
  return out;
}

Trajectory ReverseSampler::sample(const ScoreFn& score, Rng& rng) const {
  const EventTimes events = draw_event_times(rng);
  return run_on_events(score, events, rng);
}

Trajectory sample_reverse(const SamplerConfig& config, const ScoreFn& score, Rng& rng) {
  return ReverseSampler(config).sample(score, rng);
}

std::vector<SampleRecord> sample_batch(const ReverseSampler& sampler, const ScoreFn& score,
                                       std::uint64_t seed, std::size_t n, unsigned workers) {
  std::vector<SampleRecord> records(n);
  parallel_for(n, workers, [&](std::size_t i) {
    Rng rng(seed, i);
    const Trajectory traj = sampler.sample(score, rng);
    records[i] = {traj.state.bits, traj.stats.n_events, traj.stats.n_flips};
  });
  return records;
}

HypercubeState sample_forward_conditional(HypercubeState x0, double t, Rng& rng) {
  const double q = flip_probability(t);
  std::uint64_t bits = x0.bits;
  for (int i = 0; i < x0.dim; ++i) {
    if (rng.uniform() < q) bits ^= std::uint64_t{1} << i;
  }
  return {bits, x0.dim};
}

ForwardPath sample_forward_path(HypercubeState x0, double t_max, Rng& rng) {
  if (!(t_max >= 0.0)) throw std::invalid_argument("sample_forward_path: negative horizon");
  ForwardPath path;
  std::exponential_distribution<double> gap(static_cast<double>(x0.dim));
  std::uniform_int_distribution<int> coordinate(0, x0.dim - 1);
  std::uint64_t bits = x0.bits;
  double t = gap(rng);
  while (t <= t_max) {
    const int i = coordinate(rng);
    bits ^= std::uint64_t{1} << i;
    path.events.push_back({t, i});
    t += gap(rng);
  }
  path.final_state = HypercubeState(bits, x0.dim);
  return path;
}

}  // namespace hcdiff
