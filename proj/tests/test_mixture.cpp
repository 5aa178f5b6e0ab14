#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "semibayes/common.hpp"
#include "semibayes/mixture.hpp"
#include "semibayes/priors.hpp"
#include "semibayes/rng.hpp"

using namespace semibayes;

TEST_SUITE("mixture") {

TEST_CASE("standard normal pdf at the mode") {
  const auto eta = SymmetricNormalMixture::standard_normal();
  CHECK(eta.pdf(0.0) == doctest::Approx(0.3989422804).epsilon(1e-9));
}

TEST_CASE("two-atom pdf equals the shifted normal density") {
  const SymmetricNormalMixture eta({{1.0, 1.0, 0.5}, {-1.0, 1.0, 0.5}});
  // 0.5 phi(0;1,1) + 0.5 phi(0;-1,1) = phi(1).
  CHECK(eta.pdf(0.0) == doctest::Approx(0.2419707245).epsilon(1e-9));
}

TEST_CASE("constructor rejects invalid atom lists") {
  CHECK_THROWS_AS(SymmetricNormalMixture({}), invalid_input);
  CHECK_THROWS_AS(SymmetricNormalMixture({{0.0, -1.0, 1.0}}), invalid_input);
  CHECK_THROWS_AS(SymmetricNormalMixture({{0.0, 1.0, 0.5}}), invalid_input);  // sum != 1
  // Missing mirror partner.
  CHECK_THROWS_AS(SymmetricNormalMixture({{1.0, 1.0, 1.0}}), invalid_input);
  // Mirror with different sigma.
  CHECK_THROWS_AS(SymmetricNormalMixture({{1.0, 1.0, 0.5}, {-1.0, 1.2, 0.5}}), invalid_input);
}

TEST_CASE("pdf is positive and even for random prior draws") {
  PriorConfig cfg;
  cfg.K = 8;
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto eta = sample_symmetrized_dp(cfg, rng);
    for (double x : {0.0, 0.3, 1.7, 4.2, 9.9, 25.0}) {
      CHECK(eta.pdf(x) > 0.0);
      CHECK(eta.pdf(x) == doctest::Approx(eta.pdf(-x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gaussian score and curvature are linear and constant") {
  const auto eta = SymmetricNormalMixture::standard_normal();
  CHECK(eta.ell_dot(2.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(eta.ell(0.0) == doctest::Approx(-0.9189385332).epsilon(1e-10));
  for (double y : {-3.0, 0.0, 1.0, 7.5}) CHECK(eta.ell_ddot(y) == doctest::Approx(-1.0));
}

TEST_CASE("ell_dot and ell_ddot match finite differences across random mixtures") {
  PriorConfig cfg;
  cfg.K = 6;
  Rng rng(42);
  for (int trial = 0; trial < 40; ++trial) {
    const auto eta = sample_symmetrized_dp(cfg, rng);
    for (double y = -10.0; y <= 10.0; y += 1.37) {
      const double fd_dot =
          -oracles::central_diff([&](double t) { return eta.ell(t); }, y, 1e-5);
      CHECK(std::abs(eta.ell_dot(y) - fd_dot) < 1e-6);
      const double fd_ddot =
          oracles::central_diff([&](double t) { return eta.ell_dot(t); }, y, 1e-5);
      CHECK(std::abs(eta.ell_ddot(y) + fd_ddot) < 1e-6);
    }
  }
}

TEST_CASE("log pdf stays finite far in the tails") {
  const SymmetricNormalMixture eta({{2.0, 0.5, 0.5}, {-2.0, 0.5, 0.5}});
  const double v = eta.ell(100.0);
  CHECK(std::isfinite(v));
  CHECK(v < -1000.0);
  CHECK(std::isfinite(eta.ell_dot(100.0)));
  CHECK(std::isfinite(eta.ell_ddot(100.0)));
}

TEST_CASE("json round trip") {
  const SymmetricNormalMixture eta({{1.5, 0.8, 0.25}, {-1.5, 0.8, 0.25}, {0.0, 1.2, 0.5}});
  const auto back = SymmetricNormalMixture::from_json_string(eta.to_json_string());
  CHECK(back == eta);
  CHECK_THROWS_AS(SymmetricNormalMixture::from_json_string("{\"atoms\":"), invalid_input);
  CHECK_THROWS_AS(SymmetricNormalMixture::from_json_string("{}"), invalid_input);
}

TEST_CASE("variance and sampling moments agree") {
  const SymmetricNormalMixture eta({{2.0, 0.8, 0.5}, {-2.0, 0.8, 0.5}});
  CHECK(eta.variance() == doctest::Approx(4.0 + 0.64));
  Rng rng(11);
  double acc = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double x = eta.sample(rng);
    acc += x * x;
  }
  const double se = std::sqrt(2.0) * eta.variance() / std::sqrt(static_cast<double>(draws));
  CHECK(std::abs(acc / draws - eta.variance()) < 5.0 * se);
}

}  // TEST_SUITE
