#pragma once

#include "wigner/grid.hpp"

namespace wigner {

/// Gaussian initial state: means and marginal variances, no x-p correlation.
struct GaussianInit {
  double x0 = 1.0;
  double p0 = 0.0;
  double var_x = 0.05;
  double var_p = 0.05;

  /// Pure state: var_p fixed by var_x * var_p = hbar^2 / 4.
  static GaussianInit minimum_uncertainty(double x0, double p0, double var_x, double hbar);

  /// Positivity, and var_x * var_p >= hbar^2/4 (physical state).
  void validate(double hbar) const;

  bool is_minimum_uncertainty(double hbar, double tol = 1e-12) const;
};

/// Samples the normalized Gaussian on the grid and renormalizes by quadrature.
/// Throws ConfigError when the box clips the tails (outer 5% band mass above
/// 1e-8) or the grid does not resolve the widths.
WignerField gaussian_wigner(const GaussianInit& init, double hbar, GridPtr grid);

}  // namespace wigner
