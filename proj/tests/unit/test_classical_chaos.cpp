#include <cmath>

#include "doctest.h"
#include "wigner/classical_chaos.hpp"
#include "wigner/errors.hpp"

using namespace wigner;

TEST_CASE("undriven well bottom is a fixed point") {
  DuffingParams p;
  p.A = 0.0;
  p.omega = 0.0;
  const double xm = std::sqrt(2.0 * p.B / (2.0 * p.C));
  const auto traj = integrate_trajectory(p, xm, 0.0, 0.0, 10.0, 1e-3, 1000);
  REQUIRE(traj.size() == 11);
  for (const auto& s : traj) {
    CHECK(s.x == doctest::Approx(xm).epsilon(1e-12));
    CHECK(std::abs(s.p) < 1e-12);
  }
}

TEST_CASE("small oscillations about the minimum have frequency sqrt(40)") {
  DuffingParams p;
  p.A = 0.0;
  p.omega = 0.0;
  const double xm = std::sqrt(10.0);
  const double w = std::sqrt(40.0);
  const double period = 2.0 * M_PI / w;
  const auto traj = integrate_trajectory(p, xm + 1e-4, 0.0, 0.0, period, period / 4000.0, 4000);
  CHECK(std::abs((traj.back().x - xm) / 1e-4 - 1.0) < 1e-3);
  const auto half = integrate_trajectory(p, xm + 1e-4, 0.0, 0.0, 0.5 * period, period / 4000.0, 2000);
  CHECK(std::abs((half.back().x - xm) / 1e-4 + 1.0) < 1e-3);
}

TEST_CASE("RK4 conserves energy of the undriven oscillator") {
  DuffingParams p;
  p.A = 0.0;
  p.omega = 0.0;
  PhasePoint s{1.0, 0.0};
  const double e0 = energy(p, s, 0.0);
  for (int k = 0; k < 10000; ++k) s = rk4_step(p, s, k * 1e-3, 1e-3);
  CHECK(energy(p, s, 10.0) == doctest::Approx(e0).epsilon(1e-8));
}

TEST_CASE("Lyapunov exponent matches two-trajectory divergence") {
  DuffingParams p;
  LyapunovOptions o;
  o.t_total = 20.0;
  o.renorm_interval = 0.5;
  const auto r = max_lyapunov(p, 1.0, 0.0, o);
  // independent estimate: separation growth of a nearby trajectory
  const double d0 = 1e-9;
  const double dt = p.drive_period() / 4096.0;
  double log_sum = 0.0;
  PhasePoint a{1.0, 0.0};
  PhasePoint b{1.0 + d0, 0.0};
  double t = 0.0;
  const int per = static_cast<int>(std::lround(o.renorm_interval / dt));
  const int blocks = static_cast<int>(std::lround(o.t_total / o.renorm_interval));
  for (int k = 0; k < blocks; ++k) {
    for (int s = 0; s < per; ++s) {
      a = rk4_step(p, a, t, dt);
      b = rk4_step(p, b, t, dt);
      t += dt;
    }
    const double dx = b.x - a.x;
    const double dp = b.p - a.p;
    const double d = std::hypot(dx, dp);
    log_sum += std::log(d / d0);
    b = {a.x + dx * d0 / d, a.p + dp * d0 / d};
  }
  const double oracle = log_sum / t;
  CHECK(r.lambda_max == doctest::Approx(oracle).epsilon(0.2));
  CHECK(r.lambda_max > 0.0);
}

TEST_CASE("ensemble Lyapunov is seeded and reproducible") {
  DuffingParams p;
  LyapunovOptions o;
  o.t_total = 20.0;
  const GaussianInit init{1.0, 0.0, 0.05, 0.05};
  const auto a = ensemble_lyapunov(p, init, 4, o, 11);
  const auto b = ensemble_lyapunov(p, init, 4, o, 11, 2);
  REQUIRE(a.members.size() == 4);
  CHECK(a.members[0].ic.x == 1.0);
  CHECK(a.mean == b.mean);
  for (std::size_t k = 1; k < 4; ++k) {
    const double zx = (a.members[k].ic.x - 1.0) / std::sqrt(0.05);
    const double zp = a.members[k].ic.p / std::sqrt(0.05);
    CHECK(zx * zx + zp * zp <= 1.0);
  }
}

TEST_CASE("invalid Lyapunov options") {
  DuffingParams p;
  LyapunovOptions o;
  o.t_total = -1.0;
  CHECK_THROWS_AS(max_lyapunov(p, 1.0, 0.0, o), ConfigError);
}
