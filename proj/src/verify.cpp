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

#include "hcdiff/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include "hcdiff/errors.hpp"
#include "hcdiff/hypercube.hpp"
#include "hcdiff/losses.hpp"
#include "hcdiff/oracle.hpp"
#include "hcdiff/parallel.hpp"
#include "hcdiff/presets.hpp"
#include "hcdiff/sampler.hpp"
#include "hcdiff/score_train.hpp"

namespace hcdiff {

namespace {

// Pinned tolerances (full profile).
constexpr double kExactnessTol = 1e-10;
constexpr double kSamplerOdeTv = 0.02;
constexpr double kSamplerDataTv = 0.03;
constexpr double kPoissonRelTol = 0.02;
constexpr double kMassConstant = 1.5;
constexpr double kSlopeLo = 0.9;
constexpr double kSlopeHi = 1.1;
constexpr double kShapePartitionConstant = 0.1;
constexpr double kQuadratureTol = 1e-4;
constexpr double kTrainRelError = 0.15;
constexpr double kTrainTvMargin = 0.1;
constexpr double kBoundedTv = 0.03;
constexpr double kBoundedMassConstant = 1.5;
constexpr double kUniformizationTv = 0.01;
constexpr double kGradientRelTol = 1e-6;

constexpr double kQuickFactor = 10.0;

std::string printf_string(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

std::vector<std::uint64_t> states_of(const std::vector<SampleRecord>& records) {
  std::vector<std::uint64_t> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.state);
  return out;
}

double tv_vectors(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

// Ordinary least squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

SamplerConfig sampler_config(int d, double T, double delta, double c = 1.0) {
  SamplerConfig cfg;
  cfg.d = d;
  cfg.T = T;
  cfg.delta = delta;
  cfg.c = c;
  return cfg;
}

class Suite {
 public:
  explicit Suite(const VerifyOptions& options) : opt_(options) {}

  std::size_t count(std::size_t full) const {
    return opt_.profile == Profile::full ? full : static_cast<std::size_t>(full / kQuickFactor);
  }
  double stat_tol(double full) const {
    return opt_.profile == Profile::full ? full : full * std::sqrt(kQuickFactor);
  }
  std::uint64_t seed(int id, std::uint64_t k = 0) const { return opt_.seed + 1000003ull * id + k; }

  CriterionResult c1();
  CriterionResult c2();
  CriterionResult c3();
  CriterionResult c4();
  CriterionResult c5();
  CriterionResult c6();
  CriterionResult c7();
  CriterionResult c8();
  CriterionResult c9();
  CriterionResult c10();
  CriterionResult c11();
  CriterionResult c12();

 private:
  struct ExactnessRun {
    DenseDistribution p0;
    DenseDistribution p_delta;
    DenseDistribution ode;
    DenseDistribution empirical;
  };
  // Criteria 5 and 8 share one sampling run.
  const ExactnessRun& exactness_run();

  const VerifyOptions& opt_;
  std::optional<ExactnessRun> exactness_;
};

CriterionResult c_result(int id, std::string title) {
  CriterionResult r;
  r.id = id;
  r.title = std::move(title);
  return r;
}

CriterionResult Suite::c1() {
  auto r = c_result(1, "heat kernel and evolve_exact match expm");
  double worst = 0.0;
  for (int d = 1; d <= 6; ++d) {
    const auto q = oracle::GeneratorMatrix::hypercube(d);
    const std::size_t n = std::size_t{1} << d;
    for (double t : {0.05, 0.5, 2.0}) {
      const auto m = oracle::expm(q, t);
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          const double k = heat_kernel(HypercubeState(x ^ y, d), t);
          worst = std::max(worst, std::abs(k - m(x, y)));
        }
      }
      for (std::uint64_t s = 0; s < 20; ++s) {
        const auto p0 = presets::random_dirichlet(d, 0.5, seed(1, s));
        const auto fast = evolve_exact(p0, t);
        const auto dense = oracle::propagate(p0.mass(), m);
        for (std::size_t x = 0; x < n; ++x) worst = std::max(worst, std::abs(fast[x] - dense[x]));
      }
    }
  }
  r.passed = worst < kExactnessTol;
  r.detail = printf_string("max abs error %.3g < %g", worst, kExactnessTol);
  r.metrics = {{"max_abs_error", worst}};
  return r;
}

CriterionResult Suite::c2() {
  auto r = c_result(2, "forward KL contracts by e^{-T}");
  const int d = 8;
  const auto g = DenseDistribution::uniform(d);
  double worst_ratio = 0.0;
  std::size_t violations = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const double alpha = s % 2 == 0 ? 0.1 : 1.0;
    const auto p0 = presets::random_dirichlet(d, alpha, seed(2, s));
    const double k0 = kl(p0, g);
    for (double T : {0.5, 1.0, 2.0, 4.0}) {
      const double kT = kl(evolve_exact(p0, T), g);
      const double bound = std::exp(-T) * k0;
      if (!(kT <= bound)) ++violations;
      worst_ratio = std::max(worst_ratio, kT / bound);
    }
  }
  r.passed = violations == 0;
  r.detail = printf_string("max KL(p(T))/(e^{-T} KL(p0)) = %.4f, violations %zu", worst_ratio, violations);
  r.metrics = {{"max_ratio", worst_ratio}, {"violations", static_cast<double>(violations)}};
  return r;
}

CriterionResult Suite::c3() {
  auto r = c_result(3, "neighbor ratios bounded by coth(t)");
  const int d = 6;
  double worst = 0.0;
  std::size_t violations = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const double alpha = s % 3 == 0 ? 0.05 : (s % 3 == 1 ? 0.5 : 2.0);
    const auto p0 = presets::random_dirichlet(d, alpha, seed(3, s));
    for (double t : {0.01, 0.1, 1.0, 5.0}) {
      const double bound = score_envelope(t, GeneralEnvelope{});
      const double m = max_neighbor_ratio(evolve_exact(p0, t));
      if (!(m <= bound)) ++violations;
      worst = std::max(worst, m / bound);
    }
  }
  r.passed = violations == 0;
  r.detail = printf_string("max ratio/coth(t) = %.6f, violations %zu", worst, violations);
  r.metrics = {{"max_ratio_over_bound", worst}, {"violations", static_cast<double>(violations)}};
  return r;
}

CriterionResult Suite::c4() {
  auto r = c_result(4, "bounded ratios stay bounded under the flow");
  const int d = 6;
  const double L = 3.0;
  double worst = 0.0;
  std::size_t violations = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto p0 = presets::bounded_ratio(d, L, seed(4, s));
    for (double t : {0.0, 1e-4, 1e-3, 0.01, 0.05, 0.1, 0.3, 1.0, 3.0, 10.0}) {
      const double m = max_neighbor_ratio(evolve_exact(p0, t));
      if (!(m <= L)) ++violations;
      worst = std::max(worst, m);
    }
  }
  r.passed = violations == 0;
  r.detail = printf_string("max ratio %.6f <= L = %g, violations %zu", worst, L, violations);
  r.metrics = {{"max_ratio", worst}, {"violations", static_cast<double>(violations)}};
  return r;
}

const Suite::ExactnessRun& Suite::exactness_run() {
  if (!exactness_) {
    const int d = 4;
    const double T = 6.0, delta = 0.05;
    auto p0 = presets::random_dirichlet(d, 0.5, seed(5));
    const auto score = exact_score_fn(p0);
    const ReverseSampler sampler(sampler_config(d, T, delta));
    const auto records = sample_batch(sampler, score, seed(5, 1), count(100000), opt_.workers);
    auto ode = oracle::reverse_marginal(score, DenseDistribution::uniform(d), T, delta).to_distribution(d);
    auto p_delta = evolve_exact(p0, delta);
    auto emp = DenseDistribution::from_samples(d, states_of(records));
    exactness_ = ExactnessRun{std::move(p0), std::move(p_delta), std::move(ode), std::move(emp)};
  }
  return *exactness_;
}

CriterionResult Suite::c5() {
  auto r = c_result(5, "sampler is exact with exact scores");
  const auto& run = exactness_run();
  const double tv_ode = tv(run.empirical, run.ode);
  const double tv_data = tv(run.empirical, run.p_delta);
  const double tol_ode = stat_tol(kSamplerOdeTv), tol_data = stat_tol(kSamplerDataTv);
  r.passed = tv_ode < tol_ode && tv_data < tol_data;
  r.detail = printf_string("TV(emp, ODE) %.4f < %g, TV(emp, p(delta)) %.4f < %g", tv_ode, tol_ode, tv_data,
                           tol_data);
  r.metrics = {{"tv_ode", tv_ode}, {"tv_p_delta", tv_data}};
  return r;
}

CriterionResult Suite::c6() {
  auto r = c_result(6, "event count is Poisson with O(d(T + log 1/delta)) mass");

  // Poisson law of the total event count.
  const ReverseSampler sampler(sampler_config(4, 6.0, 0.05));
  const std::size_t n = count(100000);
  std::vector<double> counts(n);
  parallel_for(n, opt_.workers, [&](std::size_t j) {
    Rng rng(seed(6), j);
    std::size_t m = 0;
    for (const auto& iv : sampler.draw_event_times(rng).per_interval) m += iv.size();
    counts[j] = static_cast<double>(m);
  });
  double mean = 0.0, var = 0.0;
  for (double v : counts) mean += v;
  mean /= static_cast<double>(n);
  for (double v : counts) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  const double mass = sampler.schedule().total_mass;
  const double mean_err = std::abs(mean / mass - 1.0), var_err = std::abs(var / mass - 1.0);
  const double tol = stat_tol(kPoissonRelTol);
  const bool poisson_ok = mean_err < tol && var_err < tol;

  // Mass bound and shape over the grid.
  const std::vector<int> ds{2, 4, 8, 16};
  const std::vector<double> deltas{1e-1, 1e-2, 1e-3, 1e-4};
  const std::vector<double> Ts{2.0, 4.0, 8.0};
  auto total_mass = [](int d, double T, double delta, double c) {
    const auto cfg = sampler_config(d, T, delta, c);
    return build_lambda_schedule(build_partition(cfg), cfg).total_mass;
  };
  double worst_k = 0.0;
  for (double c : {1.0, kShapePartitionConstant}) {
    for (int d : ds) {
      for (double delta : deltas) {
        for (double T : Ts) {
          worst_k = std::max(worst_k, total_mass(d, T, delta, c) / (d * (T + std::log(1.0 / delta))));
        }
      }
    }
  }
  const bool k_ok = worst_k <= kMassConstant;

  double d_lo = 1e9, d_hi = -1e9, l_lo = 1e9, l_hi = -1e9;
  for (double T : Ts) {
    for (double delta : deltas) {
      std::vector<double> x, y;
      for (int d : ds) {
        x.push_back(std::log(static_cast<double>(d)));
        y.push_back(std::log(total_mass(d, T, delta, kShapePartitionConstant)));
      }
      const double s = ols_slope(x, y);
      d_lo = std::min(d_lo, s);
      d_hi = std::max(d_hi, s);
    }
    for (int d : ds) {
      std::vector<double> x, y;
      for (double delta : deltas) {
        x.push_back(std::log(1.0 / delta));
        y.push_back(total_mass(d, T, delta, kShapePartitionConstant) / d);
      }
      const double s = ols_slope(x, y);
      l_lo = std::min(l_lo, s);
      l_hi = std::max(l_hi, s);
    }
  }
  const bool shape_ok = d_lo >= kSlopeLo && d_hi <= kSlopeHi && l_lo >= kSlopeLo && l_hi <= kSlopeHi;

  r.passed = poisson_ok && k_ok && shape_ok;
  r.detail = printf_string(
      "mean/var rel err %.4f/%.4f < %g; max mass/(d(T+log 1/delta)) %.3f <= K=%g; "
      "slope in d [%.3f, %.3f], in log(1/delta) [%.3f, %.3f] within [%g, %g] (c=%g)",
      mean_err, var_err, tol, worst_k, kMassConstant, d_lo, d_hi, l_lo, l_hi, kSlopeLo, kSlopeHi,
      kShapePartitionConstant);
  r.metrics = {{"mean_rel_error", mean_err}, {"var_rel_error", var_err}, {"total_mass", mass},
               {"max_K", worst_k},           {"slope_d_min", d_lo},      {"slope_d_max", d_hi},
               {"slope_log_min", l_lo},      {"slope_log_max", l_hi}};
  return r;
}

CriterionResult Suite::c7() {
  auto r = c_result(7, "KL of the sampled law within the path-KL budget");
  const int d = 4;
  const double T = 4.0, delta = 0.05;
  const auto g = DenseDistribution::uniform(d);
  const auto buckets = TimeBuckets::geometric(delta, T, 16);
  double worst_slack = std::numeric_limits<double>::infinity();
  std::string eps_list;
  bool ok = true;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto p0 = presets::random_dirichlet(d, 1.0, seed(7, s));
    const auto exact = exact_score_fn(p0);
    const double kl_terminal = kl(evolve_exact(p0, T), g);
    const auto p_delta = evolve_exact(p0, delta);
    for (double eps : {0.01, 0.05, 0.2}) {
      const std::uint64_t noise_seed = seed(7, 100 + s);
      auto measured = [&](double sigma) {
        return average_bregman(p0, perturb_score(exact, sigma, noise_seed, buckets), T, delta,
                               TimeWeighting::uniform);
      };
      // Calibrate sigma so the measured time-averaged loss equals eps.
      double lo = 0.0, hi = 0.1;
      while (measured(hi) < eps) hi *= 2.0;
      for (int it = 0; it < 50 && hi - lo > 1e-7; ++it) {
        const double mid = 0.5 * (lo + hi);
        (measured(mid) < eps ? lo : hi) = mid;
      }
      const double sigma = 0.5 * (lo + hi);
      const auto noisy = perturb_score(exact, sigma, noise_seed, buckets);
      const double eps_measured = average_bregman(p0, noisy, T, delta, TimeWeighting::uniform);
      const auto sampled = oracle::reverse_marginal(noisy, g, T, delta).to_distribution(d);
      const double lhs = kl(p_delta, sampled);
      const double budget = kl_terminal + (T - delta) * eps_measured;
      ok = ok && lhs <= budget + kQuadratureTol;
      worst_slack = std::min(worst_slack, budget - lhs);
      if (s == 0) eps_list += printf_string("%s%.4g", eps_list.empty() ? "" : ",", eps_measured);
    }
  }
  r.passed = ok;
  r.detail = printf_string("min(budget - KL) = %.4g >= -%g over 3 p0 x eps {%s}", worst_slack, kQuadratureTol,
                           eps_list.c_str());
  r.metrics = {{"min_slack", worst_slack}};
  return r;
}

CriterionResult Suite::c8() {
  auto r = c_result(8, "TV(p0, p(delta)) <= 1 - e^{-d delta} and end-to-end TV budget");
  const int d = 6;
  double worst = 0.0;
  std::size_t violations = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p0 = presets::random_dirichlet(d, s % 2 == 0 ? 0.1 : 1.0, seed(8, s));
    for (double delta : {1e-3, 1e-2, 1e-1}) {
      const double bound = -std::expm1(-d * delta);
      const double v = tv(p0, evolve_exact(p0, delta));
      if (!(v <= bound)) ++violations;
      worst = std::max(worst, v / bound);
    }
  }
  const auto& run = exactness_run();
  const double delta = 0.05;
  const double budget = -std::expm1(-run.p0.dim() * delta) + stat_tol(kSamplerDataTv);
  const double end_to_end = tv(run.p0, run.empirical);
  r.passed = violations == 0 && end_to_end <= budget;
  r.detail = printf_string("max TV/(1-e^{-d delta}) %.4f, violations %zu; TV(p0, sampled) %.4f <= %.4f",
                           worst, violations, end_to_end, budget);
  r.metrics = {{"max_tv_over_bound", worst}, {"end_to_end_tv", end_to_end}, {"end_to_end_budget", budget}};
  return r;
}

CriterionResult Suite::c9() {
  auto r = c_result(9, "DSE training recovers the point-mass score");
  const int d = 3;
  TrainConfig cfg;
  cfg.d = d;
  cfg.T = 4.0;
  cfg.delta = 0.05;
  cfg.buckets = 16;
  const auto p0 = presets::point_mass(d);
  const auto [table, report] = train_tabular(presets::sampler_for(p0), cfg, 200000, SgdParams{}, seed(9));
  const auto exact = exact_score_fn(p0);
  const auto learned = table_as_score_fn(table);
  std::vector<double> a(d), b(d);
  double worst = 0.0;
  for (std::size_t k = 0; k < table.buckets().count(); ++k) {
    const double t = table.buckets().midpoint(k);
    const auto pt = evolve_exact(p0, t);
    for (std::uint64_t x = 0; x < pt.size(); ++x) {
      if (pt[x] < 1e-2) continue;
      exact(HypercubeState(x, d), t, a);
      learned(HypercubeState(x, d), t, b);
      for (int i = 0; i < d; ++i) worst = std::max(worst, std::abs(b[i] / a[i] - 1.0));
    }
  }

  const auto scfg = sampler_config(d, cfg.T, cfg.delta);
  const ReverseSampler sampler(scfg);
  const auto target = evolve_exact(p0, cfg.delta);
  auto law_tv = [&](const ScoreFn& s, std::uint64_t k) {
    const auto rec = sample_batch(sampler, clamp_score(s, scfg), seed(9, k), count(100000), opt_.workers);
    return tv(DenseDistribution::from_samples(d, states_of(rec)), target);
  };
  const double tv_exact = law_tv(exact, 1);
  const double tv_learned = law_tv(learned, 2);
  r.passed = worst < kTrainRelError && tv_learned <= tv_exact + kTrainTvMargin;
  r.detail = printf_string("max rel score error %.4f < %g; TV learned %.4f <= exact %.4f + %g", worst,
                           kTrainRelError, tv_learned, tv_exact, kTrainTvMargin);
  r.metrics = {{"max_rel_error", worst}, {"tv_learned", tv_learned}, {"tv_exact", tv_exact},
               {"final_dse", report.final_dse}};
  return r;
}

CriterionResult Suite::c10() {
  auto r = c_result(10, "bounded-ratio mode samples with delta = 0");
  const int d = 4;
  const double L = 3.0, T = 6.0;
  const auto p0 = presets::bounded_ratio(d, L, seed(10));
  auto cfg = sampler_config(d, T, 0.0);
  cfg.mode = BoundedEnvelope{L};
  const ReverseSampler sampler(cfg);
  const auto rec = sample_batch(sampler, exact_score_fn(p0), seed(10, 1), count(100000), opt_.workers);
  const double v = tv(DenseDistribution::from_samples(d, states_of(rec)), p0);
  const double mass = sampler.schedule().total_mass;
  const double k = mass / (d * (T + std::log(L)));
  const double tol = stat_tol(kBoundedTv);
  r.passed = v < tol && k <= kBoundedMassConstant;
  r.detail = printf_string("TV(emp, p0) %.4f < %g; mass/(d(T+log L)) %.3f <= K=%g", v, tol, k,
                           kBoundedMassConstant);
  r.metrics = {{"tv", v}, {"total_mass", mass}, {"K", k}};
  return r;
}

CriterionResult Suite::c11() {
  auto r = c_result(11, "uniformization law does not depend on lambda");
  const auto q = oracle::three_state_example();
  const std::vector<double> p0{0.5, 0.3, 0.2};
  const double T = 2.0;
  const auto ode = oracle::integrate_forward(q, p0, 0.0, T, 20000).mass;
  const std::size_t n = count(1000000);
  std::vector<std::vector<double>> laws;
  for (double lambda : {2.5, 25.0}) {
    std::vector<std::uint8_t> out(n);
    parallel_for(n, opt_.workers, [&](std::size_t j) {
      Rng rng(seed(11, static_cast<std::uint64_t>(lambda * 10)), j);
      out[j] = static_cast<std::uint8_t>(oracle::uniformize_generic(q, lambda, p0, T, rng));
    });
    std::vector<double> law(3, 0.0);
    for (auto s : out) law[s] += 1.0 / static_cast<double>(n);
    laws.push_back(std::move(law));
  }
  const double between = tv_vectors(laws[0], laws[1]);
  const double a = tv_vectors(laws[0], ode), b = tv_vectors(laws[1], ode);
  const double tol = stat_tol(kUniformizationTv);
  r.passed = between < tol && a < tol && b < tol;
  r.detail = printf_string("TV(lambda=2.5, lambda=25) %.4f, to ODE %.4f / %.4f, all < %g", between, a, b, tol);
  r.metrics = {{"tv_between", between}, {"tv_ode_low", a}, {"tv_ode_high", b}};
  return r;
}

CriterionResult Suite::c12() {
  auto r = c_result(12, "analytic DSE gradient matches finite differences");
  const int d = 3;
  TrainConfig cfg;
  cfg.d = d;
  cfg.buckets = 4;
  const auto p0 = presets::random_dirichlet(d, 0.8, seed(12));
  const auto pairs = generate_dse_pairs(presets::sampler_for(p0), cfg, 2000, seed(12, 1));
  ScoreTable table(d, TimeBuckets::geometric(cfg.delta, cfg.T, cfg.buckets));
  Rng rng(seed(12, 2));
  for (double& v : table.theta()) v = rng.uniform() - 0.5;
  const auto grad = dse_gradient(table, pairs);
  std::vector<std::size_t> visited;
  for (std::size_t j = 0; j < grad.size(); ++j) {
    if (grad[j] != 0.0) visited.push_back(j);
  }
  if (visited.empty()) throw std::logic_error("no visited table entries");
  // Five-point central difference.
  const double h = 1e-3;
  auto at = [&](std::size_t j, double v) {
    const double saved = table.theta()[j];
    table.theta()[j] = v;
    const double f = dse_objective(table, pairs);
    table.theta()[j] = saved;
    return f;
  };
  double worst = 0.0;
  for (int probe = 0; probe < 100; ++probe) {
    const std::size_t j = visited[rng() % visited.size()];
    const double x = table.theta()[j];
    const double fd = (at(j, x - 2 * h) - 8 * at(j, x - h) + 8 * at(j, x + h) - at(j, x + 2 * h)) / (12 * h);
    worst = std::max(worst, std::abs(fd - grad[j]) / std::abs(grad[j]));
  }
  r.passed = worst < kGradientRelTol;
  r.detail = printf_string("max relative error %.3g < %g over 100 probes", worst, kGradientRelTol);
  r.metrics = {{"max_rel_error", worst}};
  return r;
}

}  // namespace

Profile parse_profile(const std::string& name) {
  if (name == "quick") return Profile::quick;
  if (name == "full") return Profile::full;
  throw ConfigError("unknown profile '" + name + "' (expected quick or full)");
}

std::string to_string(Profile p) { return p == Profile::quick ? "quick" : "full"; }

std::vector<CriterionResult> run_acceptance(const VerifyOptions& options) {
  Suite suite(options);
  using Method = CriterionResult (Suite::*)();
  const Method methods[kCriterionCount] = {&Suite::c1, &Suite::c2, &Suite::c3,  &Suite::c4,
                                           &Suite::c5, &Suite::c6, &Suite::c7,  &Suite::c8,
                                           &Suite::c9, &Suite::c10, &Suite::c11, &Suite::c12};
  std::vector<CriterionResult> results;
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = (suite.*methods[id - 1])();
    } catch (const std::exception& e) {
      r = c_result(id, "criterion " + std::to_string(id));
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  return printf_string("%s  [%2d] %s: %s (%.1fs)", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(),
                       r.detail.c_str(), r.seconds);
}

}  // namespace hcdiff
