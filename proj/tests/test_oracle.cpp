#include <cmath>
#include <vector>

#include "doctest.h"
#include "hcdiff/errors.hpp"
#include "hcdiff/oracle.hpp"
#include "hcdiff/presets.hpp"
#include "hcdiff/score.hpp"

using namespace hcdiff;
using namespace hcdiff::oracle;

namespace {

double tv_vec(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

}  // namespace

TEST_CASE("expm basics") {
  const auto q = GeneratorMatrix::hypercube(1);
  const auto I = expm(q, 0.0);
  CHECK(I(0, 0) == 1.0);
  CHECK(I(0, 1) == 0.0);

  for (double t : {0.1, 1.0, 7.5}) {
    const auto P = expm(q, t);
    const double same = 0.5 * (1.0 + std::exp(-2.0 * t));
    CHECK(std::abs(P(0, 0) - same) < 1e-12);
    CHECK(std::abs(P(1, 0) - (1.0 - same)) < 1e-12);
  }

  const auto P = expm(GeneratorMatrix::hypercube(5), 2.3);
  for (std::size_t r = 0; r < P.n(); ++r) {
    double sum = 0.0;
    for (double v : P.row(r)) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }
  CHECK_THROWS_AS(GeneratorMatrix::hypercube(13), DimensionError);
  CHECK_THROWS(expm(q, -1.0));
}

TEST_CASE("generator validation") {
  Matrix bad(2);
  bad(0, 0) = -1.0;
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(GeneratorMatrix{bad}, std::invalid_argument);
  Matrix neg(2);
  neg(0, 1) = -1.0;
  CHECK_THROWS_AS(GeneratorMatrix::from_off_diagonal(neg), std::invalid_argument);
}

TEST_CASE("RK4 forward integration") {
  const std::vector<double> p0{0.2, 0.5, 0.3};

  SUBCASE("constant generator matches expm") {
    const auto q = three_state_example()(0.4);
    const auto exact = propagate(p0, expm(q, 1.5));
    const auto ode = integrate_forward([&](double) { return q; }, p0, 0.0, 1.5, 1000);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(ode.mass[i] - exact[i]) < 1e-8);
    CHECK(std::abs(ode.mass_drift) < 1e-12);
  }

  SUBCASE("fourth-order convergence") {
    const auto chain = three_state_example();
    const auto reference = integrate_forward(chain, p0, 0.0, 2.0, 8192).mass;
    const double e1 = tv_vec(integrate_forward(chain, p0, 0.0, 2.0, 16).mass, reference);
    const double e2 = tv_vec(integrate_forward(chain, p0, 0.0, 2.0, 32).mass, reference);
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
  }

  SUBCASE("mass conservation") {
    const auto out = integrate_forward(three_state_example(), p0, 0.0, 2.0, 4000);
    CHECK(std::abs(out.mass_drift) < 2e-9);
  }

  SUBCASE("too coarse a step aborts") {
    Matrix off(2);
    off(0, 1) = 500.0;
    off(1, 0) = 1.0;
    const auto stiff = GeneratorMatrix::from_off_diagonal(off);
    CHECK_THROWS_AS(integrate_forward([&](double) { return stiff; }, std::vector<double>{1.0, 0.0},
                                      0.0, 1.0, 10),
                    NumericalError);
  }
}

TEST_CASE("reverse generator with the exact score reverses time") {
  const int d = 3;
  const double T = 2.0;
  const double delta = 0.1;
  const auto p0 = presets::random_dirichlet(d, 1.0, 5);
  const auto pT = evolve_exact(p0, T);
  const auto out = reverse_marginal(exact_score_fn(p0), pT, T, delta, 2000);
  const auto p_delta = evolve_exact(p0, delta);
  for (std::size_t x = 0; x < p_delta.size(); ++x) CHECK(std::abs(out.mass[x] - p_delta[x]) < 1e-6);
}

TEST_CASE("generic uniformization sampler") {
  Rng rng(123);
  SUBCASE("homogeneous two-state chain matches expm") {
    Matrix off(2);
    off(0, 1) = 1.3;
    off(1, 0) = 0.4;
    const auto q = GeneratorMatrix::from_off_diagonal(off);
    const auto P = expm(q, 1.1);
    const std::vector<double> start{1.0, 0.0};
    const int n = 100000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += uniformize_generic([&](double) { return q; }, 2.0, start, 1.1, rng) == 1;
    const double p1 = P(0, 1);
    CHECK(std::abs(ones / double(n) - p1) < 4.0 * std::sqrt(p1 * (1 - p1) / n));
  }

  SUBCASE("time-varying chain matches the ODE marginal") {
    const std::vector<double> p0{0.2, 0.5, 0.3};
    const auto chain = three_state_example();
    const auto ode = integrate_forward(chain, p0, 0.0, 2.0, 4000);
    std::vector<double> counts(3, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) counts[uniformize_generic(chain, 2.5, p0, 2.0, rng)] += 1.0 / n;
    CHECK(tv_vec(counts, ode.mass) < 0.01);
  }

  SUBCASE("rate bound violation is an error") {
    CHECK_THROWS_AS(uniformize_generic(three_state_example(), 0.5, std::vector<double>{1, 0, 0}, 20.0, rng),
                    RateBoundError);
  }
}
