#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "hcdiff/losses.hpp"
#include "hcdiff/oracle.hpp"
#include "hcdiff/presets.hpp"
#include "hcdiff/sampler.hpp"
#include "hcdiff/score_train.hpp"

using namespace hcdiff;

namespace {

// h(x) = sum x log x; Bregman divergence written through the generator.
double bregman_via_generator(std::span<const double> c, std::span<const double> s) {
  double hc = 0, hs = 0, inner = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    hc += c[i] * std::log(c[i]);
    hs += s[i] * std::log(s[i]);
    inner += (std::log(s[i]) + 1.0) * (c[i] - s[i]);
  }
  return hc - hs - inner;
}

ScoreFn scaled(const ScoreFn& base, double alpha) {
  ScoreFn fn = base;
  fn.eval = [base, alpha](HypercubeState x, double t, std::span<double> out) {
    base(x, t, out);
    for (double& v : out) v *= alpha;
  };
  return fn;
}

// p and its exact score with coordinates relabeled by perm.
DenseDistribution permuted(const DenseDistribution& p, const std::vector<int>& perm) {
  std::vector<double> m(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) {
    std::size_t y = 0;
    for (int i = 0; i < p.dim(); ++i) {
      if ((x >> i) & 1u) y |= std::size_t{1} << perm[i];
    }
    m[y] = p[x];
  }
  return DenseDistribution(p.dim(), std::move(m));
}

}  // namespace

TEST_CASE("bregman values") {
  const std::vector<double> one{1.0}, two{2.0};
  CHECK(bregman(one, two) == doctest::Approx(0.3068528194400547).epsilon(1e-14));

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> c(5), s(5);
    for (auto& v : c) v = u(gen);
    for (auto& v : s) v = u(gen);
    CHECK(bregman(c, c) == 0.0);
    const double l = bregman(c, s);
    CHECK(l > 0.0);
    CHECK(std::abs(l - bregman_via_generator(c, s)) < 1e-12 * std::max(1.0, l) * 10);
  }
}

TEST_CASE("bregman sentinels") {
  const std::vector<double> c{0.0, 1.0}, s_zero_first{0.0, 1.0}, s_zero_second{1.0, 0.0};
  CHECK(bregman(c, s_zero_first) == 0.0);
  CHECK(std::isinf(bregman(c, s_zero_second)));
  const std::vector<double> c0{0.0}, s3{3.0};
  CHECK(bregman(c0, s3) == 3.0);
}

TEST_CASE("expected loss at a fixed time") {
  const int d = 4;
  const auto p0 = presets::random_dirichlet(d, 0.7, 2);
  const double t = 0.35;
  const auto pt = evolve_exact(p0, t);
  const auto exact = exact_score_fn(p0);
  CHECK(expected_loss_at(pt, exact, t) < 1e-13);

  for (double alpha : {0.5, 1.7, 3.0}) {
    // l(c, alpha c) = sum_i c_i (alpha - 1 - log alpha)
    double closed = 0.0;
    for (std::size_t x = 0; x < pt.size(); ++x) {
      for (int i = 0; i < d; ++i) closed += pt[x ^ (std::size_t{1} << i)] * (alpha - 1 - std::log(alpha));
    }
    CHECK(expected_loss_at(pt, scaled(exact, alpha), t) == doctest::Approx(closed).epsilon(1e-12));
  }
  CHECK(expected_loss_at(pt, constant_score_fn(d, 0.3), t) >= 0.0);
}

TEST_CASE("expected loss is invariant under coordinate relabeling") {
  const int d = 4;
  const auto p0 = presets::random_dirichlet(d, 0.5, 9);
  const std::vector<int> perm{2, 0, 3, 1};
  const auto q0 = permuted(p0, perm);
  const double t = 0.6;
  // A score that is the exact one times a per-coordinate factor, relabeled along with p.
  const std::vector<double> factor{0.5, 1.5, 2.0, 0.8};
  const auto exact_p = exact_score_fn(p0);
  const auto exact_q = exact_score_fn(q0);
  ScoreFn sp = exact_p, sq = exact_q;
  sp.eval = [&](HypercubeState x, double tt, std::span<double> out) {
    exact_p(x, tt, out);
    for (int i = 0; i < d; ++i) out[i] *= factor[i];
  };
  sq.eval = [&](HypercubeState x, double tt, std::span<double> out) {
    exact_q(x, tt, out);
    for (int i = 0; i < d; ++i) out[perm[i]] *= factor[i];
  };
  CHECK(expected_loss_at(evolve_exact(q0, t), sq, t) ==
        doctest::Approx(expected_loss_at(evolve_exact(p0, t), sp, t)).epsilon(1e-12));
}

TEST_CASE("path KL identity") {
  const int d = 4;
  const auto p0 = presets::random_dirichlet(d, 0.5, 4);
  const auto exact = exact_score_fn(p0);
  const double T = 3.0, delta = 0.01;
  const auto pT = evolve_exact(p0, T);
  CHECK(path_kl(p0, exact, T, delta, pT).value < 1e-12);
  const auto g = DenseDistribution::uniform(d);
  const auto report = path_kl(p0, exact, T, delta, g);
  CHECK(report.value == doctest::Approx(kl(pT, g)).epsilon(1e-10));
  CHECK_FALSE(report.flagged);
  CHECK(report.n_states_visited == 16);
  CHECK_THROWS(path_kl(p0, exact, T, T, g));
  CHECK_THROWS(path_kl(p0, exact, T, delta, g, 1));
}

TEST_CASE("path KL with the exact score decays at least like e^{-T}") {
  const int d = 6;
  const auto p0 = presets::random_dirichlet(d, 0.3, 8);
  const auto exact = exact_score_fn(p0);
  const auto g = DenseDistribution::uniform(d);
  auto at = [&](double T) { return path_kl(p0, exact, T, 0.01, g, 9).value; };
  for (double T = 2.0; T <= 6.0; T += 1.0) CHECK(at(T + 1) / at(T) <= std::exp(-1.0));
  // Asymptotically the slowest Walsh mode decays like e^{-2t}, so KL like e^{-4t}.
  CHECK(at(7.0) / at(6.0) == doctest::Approx(std::exp(-4.0)).epsilon(0.01));
}

TEST_CASE("path KL bounds the KL of the sampled marginal") {
  const int d = 4;
  const double T = 2.0, delta = 0.1;
  const auto g = DenseDistribution::uniform(d);
  const auto buckets = TimeBuckets::geometric(delta, T, 8);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    const auto p0 = presets::random_dirichlet(d, 1.0, 100 + trial);
    const auto noisy = perturb_score(exact_score_fn(p0), 0.3, trial, buckets);
    const double bound = path_kl(p0, noisy, T, delta, g).value;
    const auto sampled = oracle::reverse_marginal(noisy, g, T, delta, 1000).to_distribution(d);
    CHECK(kl(evolve_exact(p0, delta), sampled) <= bound + 1e-6);
  }
}

TEST_CASE("score entropy estimators on a single sample") {
  const double t = 0.5;
  const auto s = constant_score_fn(1, 2.0);
  const std::vector<DseSample> dse{{t, HypercubeState(0, 1), HypercubeState(1, 1)}};
  const double coth = 1.0 / std::tanh(t);
  CHECK(dse_estimate(dse, s).value == doctest::Approx(2.0 - coth * std::log(2.0)).epsilon(1e-14));
  const std::vector<DseSample> same{{t, HypercubeState(1, 1), HypercubeState(1, 1)}};
  CHECK(dse_estimate(same, s).value == doctest::Approx(2.0 - std::tanh(t) * std::log(2.0)).epsilon(1e-14));
  const std::vector<IseSample> ise{{t, HypercubeState(1, 1)}};
  CHECK(ise_estimate(ise, s).value == doctest::Approx(2.0 - std::log(2.0)).epsilon(1e-14));

  const auto zero = constant_score_fn(1, 0.0);
  const auto report = dse_estimate(dse, zero, 42);
  CHECK(report.flagged);
  CHECK(report.n_infinite == 1);
  CHECK(report.seed == 42u);
  CHECK(kernel_ratio(false, t) == doctest::Approx(std::tanh(t)).epsilon(1e-14));
}

namespace {

std::vector<DseSample> draw_pairs(const DenseDistribution& p0, double T, double delta, std::size_t n,
                                  std::uint64_t seed) {
  Rng rng(seed);
  const auto data = presets::sampler_for(p0);
  std::vector<DseSample> pairs;
  pairs.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = delta + (T - delta) * rng.uniform();
    const auto x0 = data(rng);
    pairs.push_back({t, x0, sample_forward_conditional(x0, t, rng)});
  }
  return pairs;
}

}  // namespace

TEST_CASE("DSE at the exact score converges to its population minimum") {
  const int d = 4;
  const double T = 2.0, delta = 0.1;
  const auto p0 = presets::random_dirichlet(d, 1.0, 21);
  const auto exact = exact_score_fn(p0);

  // Population value: E_t sum_x p_x sum_i c (1 - log c), t uniform on [delta, T].
  const auto rule = loss_quadrature(delta, T, {}, 257);
  double minimum = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double t = rule.nodes[j];
    const auto pt = evolve_exact(p0, t);
    double inner = 0.0;
    for (std::size_t x = 0; x < pt.size(); ++x) {
      for (int i = 0; i < d; ++i) {
        const double c = pt[x ^ (std::size_t{1} << i)] / pt[x];
        inner += pt[x] * c * (1.0 - std::log(c));
      }
    }
    minimum += rule.weights[j] * inner;
  }
  minimum /= (T - delta);

  std::vector<double> rms;
  const std::vector<std::size_t> sizes{1000, 10000, 100000};
  for (std::size_t n : sizes) {
    double sq = 0.0;
    const int reps = 6;
    for (int r = 0; r < reps; ++r) {
      const auto pairs = draw_pairs(p0, T, delta, n, 1000 * n + r);
      const double err = dse_estimate(pairs, exact).value - minimum;
      sq += err * err;
    }
    rms.push_back(std::sqrt(sq / reps));
  }
  const double slope = std::log(rms[2] / rms[0]) / std::log(100.0);
  CHECK(slope < -0.25);
  CHECK(slope > -0.75);
  CHECK(rms[2] < 0.05);
}

TEST_CASE("ISE and DSE differ by a score-independent constant") {
  const int d = 4;
  const double T = 2.0, delta = 0.1;
  const auto p0 = presets::random_dirichlet(d, 1.0, 33);
  const auto s1 = exact_score_fn(p0);
  const auto s2 = perturb_score(s1, 0.4, 5, TimeBuckets::geometric(delta, T, 4));
  const auto pairs = draw_pairs(p0, T, delta, 100000, 77);

  std::vector<double> diff;
  diff.reserve(pairs.size());
  for (const auto& pair : pairs) {
    const std::vector<DseSample> one{pair};
    const std::vector<IseSample> one_ise{{pair.t, pair.x_t}};
    const double ise = ise_estimate(one_ise, s1).value - ise_estimate(one_ise, s2).value;
    const double dse = dse_estimate(one, s1).value - dse_estimate(one, s2).value;
    diff.push_back(ise - dse);
  }
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / diff.size();
  double var = 0.0;
  for (double v : diff) var += (v - mean) * (v - mean);
  var /= (diff.size() - 1);
  CHECK(std::abs(mean) < 4.0 * std::sqrt(var / diff.size()));
}

TEST_CASE("quadrature rule integrates smooth and 1/t integrands") {
  const auto rule = loss_quadrature(1e-3, 4.0, std::vector<double>{0.5, 2.0}, 65);
  double poly = 0.0, inv = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    poly += rule.weights[j] * rule.nodes[j] * rule.nodes[j];
    inv += rule.weights[j] / rule.nodes[j];
  }
  CHECK(poly == doctest::Approx((64.0 - 1e-9) / 3.0).epsilon(1e-6));
  CHECK(inv == doctest::Approx(std::log(4.0 / 1e-3)).epsilon(1e-6));
  const auto from_zero = loss_quadrature(0.0, 1.0, {}, 129);
  double lin = 0.0;
  for (std::size_t j = 0; j < from_zero.nodes.size(); ++j) lin += from_zero.weights[j] * from_zero.nodes[j];
  CHECK(lin == doctest::Approx(0.5).epsilon(1e-5));
}
