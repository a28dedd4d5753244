#include "wigner/potentials.hpp"

#include <cmath>
#include <numbers>

#include "wigner/errors.hpp"

namespace wigner {

void DuffingParams::validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("hamiltonian.m", "mass must be positive");
  if (!(C >= 0.0) || !std::isfinite(C)) {
    throw ConfigError("hamiltonian.C", "quartic coefficient must be non-negative");
  }
  if (!std::isfinite(B)) throw ConfigError("hamiltonian.B", "must be finite");
  if (!std::isfinite(A)) throw ConfigError("hamiltonian.A", "must be finite");
  if (!std::isfinite(omega) || omega < 0.0) {
    throw ConfigError("hamiltonian.omega", "must be finite and non-negative");
  }
}

double DuffingParams::drive_period() const {
  return omega > 0.0 ? 2.0 * std::numbers::pi / omega : 0.0;
}

double potential(const DuffingParams& params, double x, double t) {
  const double x2 = x * x;
  return -params.B * x2 + 0.5 * params.C * x2 * x2 + params.A * x * std::cos(params.omega * t);
}

double force_gradient(const DuffingParams& params, double x, double t) {
  return -2.0 * params.B * x + 2.0 * params.C * x * x * x + params.A * std::cos(params.omega * t);
}

double third_derivative(const DuffingParams& params, double x) { return 12.0 * params.C * x; }

double classical_kernel(const DuffingParams& params, double x, double lam, double t) {
  return lam * force_gradient(params, x, t);
}

double quantum_excess(const DuffingParams& params, double hbar, double x, double lam) {
  return 0.5 * params.C * hbar * hbar * x * lam * lam * lam;
}

double moyal_kernel(const DuffingParams& params, double hbar, double x, double lam, double t) {
  return classical_kernel(params, x, lam, t) + quantum_excess(params, hbar, x, lam);
}

}  // namespace wigner
