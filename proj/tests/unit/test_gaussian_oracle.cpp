#include <cmath>
#include <vector>

#include "doctest.h"
#include "wigner/errors.hpp"
#include "wigner/gaussian_oracle.hpp"

using namespace wigner;

TEST_CASE("closed forms") {
  GaussianMoments m{0.0, 0.0, 0.05, 0.0, 0.05};
  CHECK(gaussian_purity(m, 0.1) == doctest::Approx(1.0));
  CHECK(gaussian_chi2_p(m) == doctest::Approx(10.0));
  CHECK(gaussian_chi2_full(m) == doctest::Approx(20.0));
  GaussianMoments bad{0.0, 0.0, 0.05, 0.1, 0.05};
  CHECK_THROWS_AS(gaussian_purity(bad, 0.1), NumericalError);
}

TEST_CASE("harmonic rotation without diffusion") {
  const DuffingParams h{1.0, -0.5, 0.0, 0.0, 0.0};
  const auto dyn = LinearDynamics::from_duffing(h);
  const GaussianMoments m0{1.0, 0.0, 0.02, 0.0, 0.125};
  const auto m = propagate_moments(dyn, 0.0, m0, 0.0, 0.5 * M_PI);
  CHECK(m.mean_x == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(m.mean_p == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(m.sxx == doctest::Approx(0.125).epsilon(1e-9));
  CHECK(m.spp == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(gaussian_purity(m, 0.1) == doctest::Approx(gaussian_purity(m0, 0.1)).epsilon(1e-10));
}

TEST_CASE("free diffusion grows det linearly in momentum") {
  const DuffingParams frozen{1e12, 0.0, 0.0, 0.0, 0.0};
  const auto dyn = LinearDynamics::from_duffing(frozen);
  const GaussianMoments m0{0.0, 0.0, 0.05, 0.0, 0.05};
  const std::vector<double> times = {0.0, 1.0, 2.0};
  const auto ms = propagate_moments(dyn, 0.01, m0, 0.0, times);
  CHECK(ms[2].spp == doctest::Approx(0.05 + 0.04).epsilon(1e-10));
  CHECK(gaussian_purity(ms[1], 0.1) == doctest::Approx(0.1 / (2.0 * std::sqrt(0.05 * 0.07))));
}

TEST_CASE("driven mean follows the forced solution") {
  DuffingParams h{1.0, -0.5, 0.0, 0.3, 2.0};
  const auto dyn = LinearDynamics::from_duffing(h);
  const GaussianMoments m0{0.0, 0.0, 0.05, 0.0, 0.05};
  const double t = 3.0;
  const auto m = propagate_moments(dyn, 0.0, m0, 0.0, t);
  // x'' + x = -A cos(w t), x(0) = x'(0) = 0
  const double A = 0.3;
  const double w = 2.0;
  const double x = -A / (1.0 - w * w) * (std::cos(w * t) - std::cos(t));
  CHECK(m.mean_x == doctest::Approx(x).epsilon(1e-8));
}

TEST_CASE("nonlinear Hamiltonians are rejected") {
  CHECK_THROWS_AS(LinearDynamics::from_duffing(DuffingParams{}), ConfigError);
}
