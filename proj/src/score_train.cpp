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

#include "hcdiff/score_train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "hcdiff/sampler.hpp"

namespace hcdiff {

TimeBuckets::TimeBuckets(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw std::invalid_argument("time buckets need at least two edges");
  if (!(edges_.front() >= 0.0)) throw std::invalid_argument("time buckets must start at t >= 0");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (!(edges_[i] > edges_[i - 1])) throw std::invalid_argument("bucket edges must increase");
  }
}

TimeBuckets TimeBuckets::geometric(double lo, double hi, std::size_t count) {
  if (count == 0) throw std::invalid_argument("need at least one bucket");
  if (!(hi > lo) || !(lo >= 0.0)) throw std::invalid_argument("need 0 <= lo < hi");
  std::vector<double> edges;
  edges.reserve(count + 1);
  double start = lo;
  std::size_t geometric_count = count;
  if (lo == 0.0) {
    edges.push_back(0.0);
    if (count == 1) {
      edges.push_back(hi);
      return TimeBuckets(std::move(edges));
    }
    start = 1e-3 * hi;
    geometric_count = count - 1;
  }
  const double ratio = std::log(hi / start);
  for (std::size_t k = 0; k < geometric_count; ++k) {
    edges.push_back(start * std::exp(ratio * static_cast<double>(k) / geometric_count));
  }
  edges.push_back(hi);
  return TimeBuckets(std::move(edges));
}

std::vector<double> TimeBuckets::interior() const {
  return {edges_.begin() + 1, edges_.end() - 1};
}

std::size_t TimeBuckets::locate(double t) const {
  if (!(t >= lo() && t <= hi())) {
    throw std::out_of_range("time " + std::to_string(t) + " outside bucket range [" +
                            std::to_string(lo()) + ", " + std::to_string(hi()) + "]");
  }
  if (t == hi()) return count() - 1;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
  return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

double TimeBuckets::midpoint(std::size_t b) const {
  const double a = edges_.at(b);
  const double c = edges_.at(b + 1);
  return a > 0.0 ? std::sqrt(a * c) : 0.5 * (a + c);
}

ScoreTable::ScoreTable(int dim, TimeBuckets buckets, double initial_log_score)
    : ScoreTable(dim, buckets,
                 std::vector<double>(buckets.count() * (std::size_t{1} << std::clamp(dim, 1, 20)) *
                                         static_cast<std::size_t>(std::max(dim, 1)),
                                     initial_log_score)) {}

ScoreTable::ScoreTable(int dim, TimeBuckets buckets, std::vector<double> theta)
    : dim_(dim), buckets_(std::move(buckets)), theta_(std::move(theta)) {
  if (dim_ < 1 || dim_ > 20) throw DimensionError("score tables support 1 <= d <= 20");
  const std::size_t expected =
      buckets_.count() * (std::size_t{1} << dim_) * static_cast<std::size_t>(dim_);
  if (theta_.size() != expected) throw std::invalid_argument("theta has the wrong shape");
  for (double v : theta_) {
    if (!std::isfinite(v) || !std::isfinite(std::exp(v))) {
      throw std::invalid_argument("score table holds a non-finite score");
    }
  }
}

namespace {

// Per-pair data the optimizer touches repeatedly.
struct PreparedPair {
  std::size_t offset;  // index of coordinate 0 for (bucket, x_t)
  std::size_t bucket;
  std::uint64_t w;     // x_t ^ x_0
  double tanh_t;
  double coth_t;
};

std::vector<PreparedPair> prepare(const ScoreTable& table, std::span<const DseSample> pairs) {
  std::vector<PreparedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.x_t.dim != table.dim() || p.x_0.dim != table.dim()) {
      throw std::invalid_argument("pair dimension does not match table");
    }
    const std::size_t b = table.buckets().locate(p.t);
    out.push_back({table.index(b, p.x_t.bits, 0), b, p.x_t.bits ^ p.x_0.bits,
                   kernel_ratio(false, p.t), kernel_ratio(true, p.t)});
  }
  return out;
}

double pair_loss(std::span<const double> theta, const PreparedPair& p, int d) {
  double loss = 0.0;
  for (int i = 0; i < d; ++i) {
    const double th = theta[p.offset + i];
    const double r = ((p.w >> i) & 1u) ? p.coth_t : p.tanh_t;
    loss += std::exp(th) - r * th;
  }
  return loss;
}

struct EpochLoss {
  double total;
  std::vector<double> per_bucket;
};

EpochLoss evaluate(const ScoreTable& table, std::span<const PreparedPair> prepared) {
  const std::size_t B = table.buckets().count();
  std::vector<double> sum(B, 0.0);
  std::vector<std::size_t> count(B, 0);
  double total = 0.0;
  for (const auto& p : prepared) {
    const double l = pair_loss(table.theta(), p, table.dim());
    total += l;
    sum[p.bucket] += l;
    ++count[p.bucket];
  }
  EpochLoss out{prepared.empty() ? 0.0 : total / static_cast<double>(prepared.size()), {}};
  out.per_bucket.resize(B);
  for (std::size_t b = 0; b < B; ++b) {
    out.per_bucket[b] = count[b] > 0 ? sum[b] / static_cast<double>(count[b])
                                     : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

void validate_train_config(const TrainConfig& config) {
  if (config.d < 1 || config.d > 20) throw DimensionError("training supports 1 <= d <= 20");
  if (!(config.delta > 0.0) || !(config.T > config.delta)) {
    throw ConfigError("training needs 0 < delta < T (log-uniform times)");
  }
  if (config.buckets == 0) throw ConfigError("training needs at least one bucket");
}

}  // namespace

std::vector<DseSample> generate_dse_pairs(const DataSampler& data, const TrainConfig& config,
                                          std::size_t n_pairs, std::uint64_t seed) {
  validate_train_config(config);
  Rng rng(seed, 0x7061697273ull);
  const double log_lo = std::log(config.delta);
  const double log_hi = std::log(config.T);
  std::vector<DseSample> pairs;
  pairs.reserve(n_pairs);
  for (std::size_t j = 0; j < n_pairs; ++j) {
    const double t = std::clamp(std::exp(log_lo + (log_hi - log_lo) * rng.uniform()),
                                config.delta, config.T);
    const HypercubeState x0 = data(rng);
    if (x0.dim != config.d) throw std::invalid_argument("data sampler returned wrong dimension");
    pairs.push_back({t, x0, sample_forward_conditional(x0, t, rng)});
  }
  return pairs;
}

double dse_objective(const ScoreTable& table, std::span<const DseSample> pairs) {
  const auto prepared = prepare(table, pairs);
  return evaluate(table, prepared).total;
}

std::vector<double> dse_gradient(const ScoreTable& table, std::span<const DseSample> pairs) {
  const auto prepared = prepare(table, pairs);
  std::vector<double> grad(table.theta().size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(pairs.size(), 1));
  const int d = table.dim();
  for (const auto& p : prepared) {
    for (int i = 0; i < d; ++i) {
      const double r = ((p.w >> i) & 1u) ? p.coth_t : p.tanh_t;
      grad[p.offset + i] += (std::exp(table.theta()[p.offset + i]) - r) * inv_n;
    }
  }
  return grad;
}

std::pair<ScoreTable, TrainReport> train_on_pairs(std::span<const DseSample> pairs,
                                                  const TrainConfig& config, const SgdParams& sgd,
                                                  std::uint64_t seed) {
  validate_train_config(config);
  if (pairs.empty()) throw std::invalid_argument("training needs at least one pair");
  if (sgd.epochs == 0 || sgd.batch_size == 0 || !(sgd.learning_rate > 0.0) ||
      !(sgd.final_learning_rate > 0.0)) {
    throw ConfigError("invalid SGD parameters");
  }
  ScoreTable table(config.d, TimeBuckets::geometric(config.delta, config.T, config.buckets));
  const auto prepared = prepare(table, pairs);
  const int d = config.d;
  const std::size_t n_params = table.theta().size();

  std::vector<double> m(n_params, 0.0);
  std::vector<double> v(n_params, 0.0);
  std::vector<std::uint32_t> steps(n_params, 0);
  std::vector<double> grad(n_params, 0.0);
  std::vector<char> in_batch(n_params, 0);
  std::vector<std::size_t> touched;
  std::vector<std::size_t> order(prepared.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed, 0x73676400ull);

  TrainReport report;
  report.seed = seed;
  report.n_pairs = pairs.size();
  const double decay =
      sgd.epochs > 1 ? std::log(sgd.final_learning_rate / sgd.learning_rate) /
                           static_cast<double>(sgd.epochs - 1)
                     : 0.0;

  auto theta = table.theta();
  for (std::size_t epoch = 0; epoch < sgd.epochs; ++epoch) {
    const double lr = sgd.learning_rate * std::exp(decay * static_cast<double>(epoch));
    report.learning_rates.push_back(lr);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += sgd.batch_size) {
      const std::size_t end = std::min(order.size(), start + sgd.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      touched.clear();
      for (std::size_t j = start; j < end; ++j) {
        const auto& p = prepared[order[j]];
        for (int i = 0; i < d; ++i) {
          const std::size_t e = p.offset + i;
          const double r = ((p.w >> i) & 1u) ? p.coth_t : p.tanh_t;
          if (!in_batch[e]) {
            in_batch[e] = 1;
            touched.push_back(e);
          }
          grad[e] += (std::exp(theta[e]) - r) * inv_batch;
        }
      }
      for (std::size_t e : touched) {
        const double g = grad[e];
        grad[e] = 0.0;
        in_batch[e] = 0;
        const auto k = ++steps[e];
        m[e] = sgd.beta1 * m[e] + (1.0 - sgd.beta1) * g;
        v[e] = sgd.beta2 * v[e] + (1.0 - sgd.beta2) * g * g;
        const double m_hat = m[e] / (1.0 - std::pow(sgd.beta1, k));
        const double v_hat = v[e] / (1.0 - std::pow(sgd.beta2, k));
        theta[e] -= lr * m_hat / (std::sqrt(v_hat) + sgd.epsilon);
      }
      ++report.iterations;
    }
    EpochLoss loss = evaluate(table, prepared);
    report.epoch_loss.push_back(loss.total);
    report.per_bucket_loss.push_back(std::move(loss.per_bucket));
    if (!std::isfinite(loss.total)) {
      report.final_dse = loss.total;
      throw TrainingError("DSE became non-finite in epoch " + std::to_string(epoch), report);
    }
  }
  report.final_dse = report.epoch_loss.back();

  SamplerConfig clamp_config;
  clamp_config.d = config.d;
  clamp_config.T = config.T;
  clamp_config.delta = config.delta;
  const ScoreFn raw = table_as_score_fn(table);
  const ScoreFn clamped = clamp_score(raw, clamp_config);
  std::vector<double> s(static_cast<std::size_t>(d));
  std::vector<double> sc(static_cast<std::size_t>(d));
  for (const auto& p : pairs) {
    raw(p.x_t, p.t, s);
    clamped(p.x_t, p.t, sc);
    for (int i = 0; i < d; ++i) report.clamp_removed_mass += s[i] - sc[i];
  }
  report.clamp_removed_mass /= static_cast<double>(pairs.size());
  report.clamped_dse = dse_estimate(pairs, clamped).value;
  return {std::move(table), std::move(report)};
}

std::pair<ScoreTable, TrainReport> train_tabular(const DataSampler& data, const TrainConfig& config,
                                                 std::size_t n_pairs, const SgdParams& sgd,
                                                 std::uint64_t seed) {
  if (n_pairs == 0) throw std::invalid_argument("train_tabular needs n_pairs >= 1");
  const auto pairs = generate_dse_pairs(data, config, n_pairs, seed);
  return train_on_pairs(pairs, config, sgd, seed);
}

ScoreFn table_as_score_fn(const ScoreTable& table) {
  auto shared = std::make_shared<const ScoreTable>(table);
  ScoreFn fn;
  fn.dim = table.dim();
  fn.breakpoints = table.buckets().interior();
  fn.eval = [shared](HypercubeState x, double t, std::span<double> out) {
    const std::size_t b = shared->buckets().locate(t);
    const std::size_t base = shared->index(b, x.bits, 0);
    for (int i = 0; i < shared->dim(); ++i) out[i] = std::exp(shared->theta()[base + i]);
  };
  return fn;
}

ScoreTable table_from_score_fn(const ScoreFn& score, const TimeBuckets& buckets) {
  ScoreTable table(score.dim, buckets);
  const std::size_t n = std::size_t{1} << score.dim;
  std::vector<double> s(static_cast<std::size_t>(score.dim));
  for (std::size_t b = 0; b < buckets.count(); ++b) {
    const double t = buckets.midpoint(b);
    for (std::size_t x = 0; x < n; ++x) {
      score(HypercubeState(x, score.dim), t, s);
      for (int i = 0; i < score.dim; ++i) {
        if (!(s[i] > 0.0)) throw std::invalid_argument("cannot tabulate a zero score");
        table.theta()[table.index(b, x, i)] = std::log(s[i]);
      }
    }
  }
  return table;
}

ScoreFn perturb_score(const ScoreFn& base, double noise_level, std::uint64_t seed,
                      const TimeBuckets& buckets) {
  if (!(noise_level >= 0.0) || !std::isfinite(noise_level)) {
    throw std::invalid_argument("noise level must be finite and >= 0");
  }
  if (base.dim < 1 || base.dim > 16) throw DimensionError("perturb_score supports d <= 16");
  const std::size_t n = std::size_t{1} << base.dim;
  auto factors = std::make_shared<std::vector<double>>(buckets.count() * n * base.dim);
  Rng rng(seed, 0x6e6f697365ull);
  std::normal_distribution<double> normal;
  for (double& f : *factors) f = std::exp(noise_level * normal(rng));

  ScoreFn fn;
  fn.dim = base.dim;
  fn.breakpoints = base.breakpoints;
  for (double e : buckets.interior()) fn.breakpoints.push_back(e);
  std::sort(fn.breakpoints.begin(), fn.breakpoints.end());
  fn.eval = [base, factors, buckets, n](HypercubeState x, double t, std::span<double> out) {
    base(x, t, out);
    const std::size_t offset = (buckets.locate(t) * n + x.bits) * static_cast<std::size_t>(base.dim);
    for (int i = 0; i < base.dim; ++i) out[i] *= (*factors)[offset + i];
  };
  return fn;
}

}  // namespace hcdiff
