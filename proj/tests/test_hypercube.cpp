#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "hcdiff/errors.hpp"
#include "hcdiff/hypercube.hpp"
#include "hcdiff/oracle.hpp"
#include "hcdiff/presets.hpp"

using namespace hcdiff;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// e^{tQ} for the one-coordinate generator [[-1, 1], [1, -1]] by its power series.
std::array<double, 4> series_kernel_1d(double t) {
  std::array<double, 4> sum{1, 0, 0, 1};
  std::array<double, 4> term{1, 0, 0, 1};
  for (int n = 1; n < 80; ++n) {
    const std::array<double, 4> next{
        (-term[0] + term[1]) * t / n, (term[0] - term[1]) * t / n,
        (-term[2] + term[3]) * t / n, (term[2] - term[3]) * t / n};
    term = next;
    for (int i = 0; i < 4; ++i) sum[i] += term[i];
  }
  return sum;
}

}  // namespace

TEST_CASE("heat kernel closed-form values") {
  CHECK(heat_kernel(HypercubeState(0, 1), 0.0) == 1.0);
  CHECK(heat_kernel(HypercubeState(1, 1), 0.0) == 0.0);
  CHECK(heat_kernel(HypercubeState(1, 1), 40.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(heat_kernel(HypercubeState(0, 1), -0.1), std::invalid_argument);
}

TEST_CASE("heat kernel matches the dense matrix exponential") {
  const auto P = oracle::expm(oracle::GeneratorMatrix::hypercube(3), 0.5);
  CHECK(std::abs(heat_kernel(HypercubeState(0b101, 3), 0.5) - P(0, 0b101)) < 1e-10);
  for (std::size_t a = 0; a < 8; ++a) {
    for (std::size_t b = 0; b < 8; ++b) {
      CHECK(std::abs(heat_kernel(HypercubeState(a ^ b, 3), 0.5) - P(a, b)) < 1e-12);
    }
  }
}

TEST_CASE("heat kernel sums to one") {
  for (double t : {0.0, 0.01, 0.3, 2.0}) {
    double sum = 0.0;
    for (std::uint64_t w = 0; w < 64; ++w) sum += heat_kernel(HypercubeState(w, 6), t);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("flip probability") {
  CHECK(flip_probability(0.0) == 0.0);
  CHECK(flip_probability(50.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(flip_probability(0.3) == doctest::Approx(heat_kernel(HypercubeState(1, 1), 0.3)).epsilon(1e-14));
  CHECK_THROWS_AS(flip_probability(-1e-9), std::invalid_argument);
}

TEST_CASE("evolve_exact against independent oracles") {
  SUBCASE("uniform is stationary") {
    const auto g = DenseDistribution::uniform(7);
    for (double t : {0.0, 0.1, 1.0, 10.0}) {
      CHECK(max_abs_diff(evolve_exact(g, t).mass(), g.mass()) < 1e-12);
    }
  }
  SUBCASE("point mass in d=1 matches the power series") {
    const auto p0 = DenseDistribution::point_mass(HypercubeState(0, 1));
    for (double t : {0.05, 0.7, 3.0}) {
      const auto series = series_kernel_1d(t);
      const auto p = evolve_exact(p0, t);
      CHECK(std::abs(p[0] - series[0]) < 1e-13);
      CHECK(std::abs(p[1] - series[1]) < 1e-13);
      CHECK(p[0] == doctest::Approx((1 + std::exp(-2 * t)) / 2).epsilon(1e-14));
    }
  }
  SUBCASE("random p0 at d=6 matches expm") {
    const auto P = oracle::expm(oracle::GeneratorMatrix::hypercube(6), 0.7);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto p0 = presets::random_dirichlet(6, 1.0, seed);
      const auto expected = oracle::propagate(p0.mass(), P);
      CHECK(max_abs_diff(evolve_exact(p0, 0.7).mass(), expected) < 1e-10);
    }
  }
  CHECK_THROWS_AS(evolve_exact(DenseDistribution::uniform(2), -1.0), std::invalid_argument);
}

TEST_CASE("semigroup, kernel consistency and mass conservation") {
  const auto p0 = presets::random_dirichlet(8, 0.5, 11);
  const auto ps = evolve_exact(p0, 0.3);
  CHECK(max_abs_diff(evolve_exact(ps, 0.9).mass(), evolve_exact(p0, 1.2).mass()) < 1e-10);

  double sum = 0.0;
  for (double m : ps.mass()) {
    CHECK(m >= 0.0);
    sum += m;
  }
  CHECK(std::abs(sum - 1.0) < 1e-13);

  const HypercubeState a(0b10110, 5);
  const auto pa = evolve_exact(DenseDistribution::point_mass(a), 0.4);
  for (std::uint64_t b = 0; b < 32; ++b) {
    CHECK(std::abs(pa[b] - heat_kernel(HypercubeState(a.bits ^ b, 5), 0.4)) < 1e-12);
  }
}

TEST_CASE("exact score") {
  CHECK(exact_score(DenseDistribution::uniform(3), HypercubeState(5, 3)).ratios()[1] == 1.0);
  const DenseDistribution p(2, {0.4, 0.3, 0.2, 0.1});
  const auto s = exact_score(p, HypercubeState(0, 2));
  CHECK(s[0] == doctest::Approx(0.75));
  CHECK(s[1] == doctest::Approx(0.5));

  const DenseDistribution with_hole(2, {0.5, 0.0, 0.5, 0.0});
  CHECK_THROWS_AS(exact_score(with_hole, HypercubeState(1, 2)), ZeroMassError);
  CHECK(exact_score(with_hole, HypercubeState(0, 2))[0] == 0.0);
}

TEST_CASE("score envelope") {
  CHECK(score_envelope(40.0, GeneralEnvelope{}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(score_envelope(0.5, GeneralEnvelope{}) == doctest::Approx(2.163953413738653).epsilon(1e-14));
  CHECK(score_envelope(0.01, BoundedEnvelope{3.0}) == 3.0);
  CHECK(score_envelope(0.0, BoundedEnvelope{3.0}) == 3.0);
  CHECK(score_envelope(2.0, BoundedEnvelope{3.0}) == doctest::Approx(1.0 / std::tanh(2.0)));
  CHECK_THROWS(score_envelope(0.0, GeneralEnvelope{}));

  // The exact scores of 50 random data distributions never exceed it, and a
  // point mass attains it.
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pt = evolve_exact(presets::random_dirichlet(6, 0.2, seed), 0.5);
    worst = std::max(worst, max_neighbor_ratio(pt));
  }
  CHECK(worst <= score_envelope(0.5, GeneralEnvelope{}));
  const auto peak = evolve_exact(presets::point_mass(6), 0.5);
  CHECK(max_neighbor_ratio(peak) == doctest::Approx(score_envelope(0.5, GeneralEnvelope{})).epsilon(1e-12));
}

TEST_CASE("score bound and bounded-ratio propagation") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p0 = presets::random_dirichlet(6, 0.1, seed);
    for (double t : {0.01, 0.1, 1.0, 5.0}) {
      CHECK(max_neighbor_ratio(evolve_exact(p0, t)) <= score_envelope(t, GeneralEnvelope{}));
    }
    const auto q0 = presets::bounded_ratio(6, 3.0, seed);
    REQUIRE(max_neighbor_ratio(q0) <= 3.0);
    for (double t : {0.001, 0.1, 1.0}) CHECK(max_neighbor_ratio(evolve_exact(q0, t)) <= 3.0);
  }
}

TEST_CASE("divergences") {
  const auto p = presets::random_dirichlet(5, 1.0, 3);
  CHECK(kl(p, p) == 0.0);
  CHECK(tv(p, p) == 0.0);
  const auto g = DenseDistribution::uniform(5);
  CHECK(kl(presets::point_mass(5), g) == doctest::Approx(5 * std::log(2.0)).epsilon(1e-14));
  CHECK(entropy(g) == doctest::Approx(5 * std::log(2.0)).epsilon(1e-14));
  CHECK(std::isinf(kl(g, presets::point_mass(5))));
  CHECK(tv(presets::point_mass(5, 0), presets::point_mass(5, 1)) == 1.0);
  CHECK_THROWS(kl(g, DenseDistribution::uniform(4)));
}

TEST_CASE("forward convergence in KL") {
  const auto g = DenseDistribution::uniform(8);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p0 = presets::random_dirichlet(8, 0.05, seed);
    const double kl0 = kl(p0, g);
    for (double T : {0.5, 1.0, 2.0, 4.0}) CHECK(kl(evolve_exact(p0, T), g) <= std::exp(-T) * kl0);
  }
}

TEST_CASE("distribution construction is validated") {
  CHECK_THROWS_AS(DenseDistribution(2, {0.5, 0.5, 0.1, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(DenseDistribution(2, {0.5, 0.5, 0.1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(DenseDistribution(1, {0.5, 0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(DenseDistribution::uniform(25), DimensionError);
  CHECK_THROWS_AS(HypercubeState(4, 2), std::invalid_argument);
  CHECK_THROWS_AS(HypercubeState(0, 64), DimensionError);
  const auto p = DenseDistribution::normalized(2, {1, 1, 2, 0});
  CHECK(p[2] == 0.5);
  const std::vector<std::uint64_t> seen{0, 0, 3, 1};
  const auto e = DenseDistribution::from_samples(2, seen);
  CHECK(e[0] == 0.5);
  CHECK(e[2] == 0.0);
}
