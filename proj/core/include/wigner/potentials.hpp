#pragma once

namespace wigner {

/// Driven Duffing Hamiltonian H = p^2/(2m) - B x^2 + (C/2) x^4 + A x cos(omega t).
struct DuffingParams {
  double m = 1.0;
  double B = 10.0;
  double C = 1.0;
  double A = 1.0;
  double omega = 5.35;

  void validate() const;

  /// 2 pi / omega; zero when the drive frequency is zero.
  double drive_period() const;
};

/// Selects the phase-space generator: the full Moyal bracket or its
/// classical (Poisson-bracket) truncation.
enum class Dynamics { quantum, classical };

double potential(const DuffingParams& params, double x, double t);

/// dV/dx including the drive.
double force_gradient(const DuffingParams& params, double x, double t);

/// d^3V/dx^3 = 12 C x. Higher derivatives beyond the fourth vanish.
double third_derivative(const DuffingParams& params, double x);

/// Phase rate multiplying the (x, lambda) spectrum for the potential part of
/// the Moyal bracket: [V(x + hbar lam/2) - V(x - hbar lam/2)] / hbar, written
/// in closed form lam V'(x,t) + (C/2) hbar^2 x lam^3.
double moyal_kernel(const DuffingParams& params, double hbar, double x, double lam, double t);

/// Poisson-bracket part of the kernel: lam V'(x,t).
double classical_kernel(const DuffingParams& params, double x, double lam, double t);

/// moyal_kernel - classical_kernel. Depends only on the quartic coefficient.
double quantum_excess(const DuffingParams& params, double hbar, double x, double lam);

/// Dispatch on the dynamics mode.
inline double kernel(Dynamics mode, const DuffingParams& params, double hbar, double x,
                     double lam, double t) {
  return mode == Dynamics::quantum ? moyal_kernel(params, hbar, x, lam, t)
                                   : classical_kernel(params, x, lam, t);
}

}  // namespace wigner
