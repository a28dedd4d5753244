#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "wigner/potentials.hpp"
#include "wigner/states.hpp"

namespace wigner {

struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
  double p = 0.0;
};

/// Fixed-step classical RK4 for x' = p/m, p' = -V'(x, t).
/// Returns samples every `sample_every` steps, including both endpoints.
/// Throws NumericalError on non-finite state.
std::vector<TrajectorySample> integrate_trajectory(const DuffingParams& params, double x0,
                                                   double p0, double t0, double t1, double dt,
                                                   std::size_t sample_every = 1);

/// Single RK4 step of the flow, exposed for oracles and tests.
PhasePoint rk4_step(const DuffingParams& params, PhasePoint s, double t, double dt);

/// Total energy p^2/2m + V(x, t).
double energy(const DuffingParams& params, PhasePoint s, double t);

struct LyapunovResult {
  double lambda_max = 0.0;
  /// (t, running estimate) after every renormalization.
  std::vector<std::pair<double, double>> finite_time_series;
  double last_quarter_mean = 0.0;
  double last_quarter_std = 0.0;
  PhasePoint ic;
  /// Drive phase omega * t0 at the start, modulo 2 pi.
  double phase = 0.0;
};

struct LyapunovOptions {
  double t_total = 1000.0;
  double renorm_interval = 1.0;
  /// Integration step; zero selects drive_period / 4096 (or 1e-3 undriven).
  double dt = 0.0;
  double t0 = 0.0;
};

/// Benettin estimate of the maximal exponent: co-integrates the tangent
/// flow, renormalizes every renorm_interval and averages the log stretch.
LyapunovResult max_lyapunov(const DuffingParams& params, double x0, double p0,
                            const LyapunovOptions& opts = {});

struct EnsembleLyapunov {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<LyapunovResult> members;
};

/// Mean of max_lyapunov over `count` initial conditions: the Gaussian centre
/// plus points drawn uniformly inside its 1-sigma ellipse (fixed seed).
EnsembleLyapunov ensemble_lyapunov(const DuffingParams& params, const GaussianInit& init,
                                   std::size_t count = 16, const LyapunovOptions& opts = {},
                                   std::uint64_t seed = 20050101, std::size_t workers = 1);

}  // namespace wigner
