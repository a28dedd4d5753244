#include "wigner/states.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wigner/errors.hpp"

namespace wigner {

namespace {
constexpr double kTailLimit = 1e-8;
constexpr double kResolutionTolerance = 1e-5;
}  // namespace

GaussianInit GaussianInit::minimum_uncertainty(double x0, double p0, double var_x, double hbar) {
  if (!(var_x > 0.0)) throw ConfigError("initial_state.var_x", "must be positive");
  if (!(hbar > 0.0)) throw ConfigError("evolution.hbar", "must be positive");
  return GaussianInit{x0, p0, var_x, hbar * hbar / (4.0 * var_x)};
}

void GaussianInit::validate(double hbar) const {
  if (!(var_x > 0.0) || !std::isfinite(var_x)) {
    throw ConfigError("initial_state.var_x", "must be positive");
  }
  if (!(var_p > 0.0) || !std::isfinite(var_p)) {
    throw ConfigError("initial_state.var_p", "must be positive");
  }
  if (!std::isfinite(x0)) throw ConfigError("initial_state.x0", "must be finite");
  if (!std::isfinite(p0)) throw ConfigError("initial_state.p0", "must be finite");
  const double bound = hbar * hbar / 4.0;
  if (var_x * var_p < bound * (1.0 - 1e-12)) {
    throw ConfigError("initial_state.var_p", "var_x * var_p is below hbar^2/4");
  }
}

bool GaussianInit::is_minimum_uncertainty(double hbar, double tol) const {
  const double bound = hbar * hbar / 4.0;
  return std::abs(var_x * var_p - bound) <= tol * std::max(1.0, bound);
}

WignerField gaussian_wigner(const GaussianInit& init, double hbar, GridPtr grid) {
  init.validate(hbar);
  WignerField field(grid);
  const Grid& g = *grid;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(init.var_x * init.var_p));
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double ux = g.x(i) - init.x0;
    const double ex = ux * ux / (2.0 * init.var_x);
    for (std::size_t j = 0; j < g.np(); ++j) {
      const double up = g.p(j) - init.p0;
      field.at(i, j) = norm * std::exp(-ex - up * up / (2.0 * init.var_p));
    }
  }

  const double tail = tail_mass(field);
  if (tail > kTailLimit) {
    std::ostringstream msg;
    msg << "Gaussian tail mass " << tail << " in the outer 5% band exceeds " << kTailLimit;
    throw ConfigError("initial_state", msg.str());
  }

  const double mass = integrate(field);
  for (double& v : field.values) v /= mass;

  const double expected = 1.0 / (4.0 * std::numbers::pi * std::sqrt(init.var_x * init.var_p));
  const double rel = std::abs(l2_norm_sq(field) / expected - 1.0);
  if (rel > kResolutionTolerance) {
    std::ostringstream msg;
    msg << "grid does not resolve the Gaussian widths (L2 quadrature error " << rel << ")";
    throw ConfigError("initial_state", msg.str());
  }
  return field;
}

}  // namespace wigner
