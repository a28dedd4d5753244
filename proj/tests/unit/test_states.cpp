#include <cmath>
#include <numbers>

#include "doctest.h"
#include "wigner/diagnostics.hpp"
#include "wigner/errors.hpp"
#include "wigner/states.hpp"

using namespace wigner;

TEST_CASE("minimum-uncertainty Gaussian is pure and normalized") {
  auto g = make_grid({});
  const auto init = GaussianInit::minimum_uncertainty(1.0, 0.0, 0.05, 0.1);
  CHECK(init.var_p == doctest::Approx(0.05));
  CHECK(init.is_minimum_uncertainty(0.1));
  const auto f = gaussian_wigner(init, 0.1, g);
  CHECK(integrate(f) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(purity(f, 0.1) == doctest::Approx(1.0).epsilon(1e-6));
  const auto m = moments(f);
  CHECK(m.mean_x == doctest::Approx(1.0));
  CHECK(m.var_x == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(m.var_p == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("mixed Gaussian has purity hbar / (2 sigma_x sigma_p)") {
  auto g = make_grid({});
  GaussianInit init{0.0, 0.0, 0.05, 0.1};
  init.validate(0.1);
  const auto f = gaussian_wigner(init, 0.1, g);
  CHECK(purity(f, 0.1) == doctest::Approx(0.1 / (2.0 * std::sqrt(0.005))).epsilon(1e-6));
}

TEST_CASE("unphysical and unresolved states are rejected") {
  GaussianInit bad{1.0, 0.0, 0.05, 0.01};
  CHECK_THROWS_AS(bad.validate(0.1), ConfigError);
  auto g = make_grid({});
  CHECK_THROWS_AS(gaussian_wigner(GaussianInit{5.8, 0.0, 0.05, 0.05}, 0.1, g), ConfigError);
  CHECK_THROWS_AS(gaussian_wigner(GaussianInit{0.0, 0.0, 1e-5, 1e-3}, 1e-4, g), ConfigError);
  CHECK_THROWS_AS(GaussianInit::minimum_uncertainty(0.0, 0.0, -1.0, 0.1), ConfigError);
}
