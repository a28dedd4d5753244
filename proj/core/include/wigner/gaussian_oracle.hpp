#pragma once

#include <span>
#include <vector>

#include "wigner/potentials.hpp"
#include "wigner/states.hpp"

namespace wigner {

/// Means and covariance of a Gaussian phase-space density.
struct GaussianMoments {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double sxx = 0.0;
  double sxp = 0.0;
  double spp = 0.0;

  double det() const { return sxx * spp - sxp * sxp; }
  bool positive_definite() const { return sxx > 0.0 && det() > 0.0; }

  static GaussianMoments from_init(const GaussianInit& init);
};

/// d(x, p)/dt = F (x, p) + (0, -A cos(omega t)). Only linear forces.
struct LinearDynamics {
  double fxx = 0.0;
  double fxp = 0.0;
  double fpx = 0.0;
  double fpp = 0.0;
  double drive_amplitude = 0.0;
  double omega = 0.0;

  /// Throws ConfigError (unsupported) when the quartic coefficient is nonzero.
  static LinearDynamics from_duffing(const DuffingParams& params);
};

/// Exact moment dynamics under linear drift and momentum diffusion:
///   mean' = F mean + drive,  Sigma' = F Sigma + Sigma F^T + diag(0, 2D),
/// integrated with an adaptive Dormand-Prince stepper (tolerance 1e-12).
GaussianMoments propagate_moments(const LinearDynamics& dyn, double D, const GaussianMoments& m0,
                                  double t0, double t1);

/// Moments at each requested time, integrated as one continuous solve.
std::vector<GaussianMoments> propagate_moments(const LinearDynamics& dyn, double D,
                                               const GaussianMoments& m0, double t0,
                                               std::span<const double> times);

/// hbar / (2 sqrt(det Sigma)). Throws NumericalError if Sigma is not
/// positive definite.
double gaussian_purity(const GaussianMoments& m, double hbar);

/// Closed-form structure measures of a Gaussian: (Sigma^{-1})_pp / 2 and
/// tr(Sigma^{-1}) / 2.
double gaussian_chi2_p(const GaussianMoments& m);
double gaussian_chi2_full(const GaussianMoments& m);

}  // namespace wigner
