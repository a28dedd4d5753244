#include "wigner/gaussian_oracle.hpp"

#include <array>
#include <cmath>
#include <boost/numeric/odeint.hpp>

#include "wigner/errors.hpp"

namespace wigner {

namespace {

using State = std::array<double, 5>;  // mean_x, mean_p, sxx, sxp, spp

constexpr double kTolerance = 1e-12;

struct MomentFlow {
  LinearDynamics dyn;
  double D;

  void operator()(const State& s, State& ds, double t) const {
    const auto& f = dyn;
    ds[0] = f.fxx * s[0] + f.fxp * s[1];
    ds[1] = f.fpx * s[0] + f.fpp * s[1] - f.drive_amplitude * std::cos(f.omega * t);
    ds[2] = 2.0 * (f.fxx * s[2] + f.fxp * s[3]);
    ds[3] = f.fxx * s[3] + f.fxp * s[4] + f.fpx * s[2] + f.fpp * s[3];
    ds[4] = 2.0 * (f.fpx * s[3] + f.fpp * s[4]) + 2.0 * D;
  }
};

State pack(const GaussianMoments& m) { return {m.mean_x, m.mean_p, m.sxx, m.sxp, m.spp}; }
GaussianMoments unpack(const State& s) { return {s[0], s[1], s[2], s[3], s[4]}; }

void require_pd(const GaussianMoments& m) {
  if (!m.positive_definite()) {
    throw NumericalError("Gaussian covariance is not positive definite");
  }
}

}  // namespace

GaussianMoments GaussianMoments::from_init(const GaussianInit& init) {
  return {init.x0, init.p0, init.var_x, 0.0, init.var_p};
}

LinearDynamics LinearDynamics::from_duffing(const DuffingParams& params) {
  params.validate();
  if (params.C != 0.0) {
    throw ConfigError("hamiltonian.C", "the Gaussian oracle supports linear dynamics only (C = 0)");
  }
  LinearDynamics d;
  d.fxp = 1.0 / params.m;
  d.fpx = 2.0 * params.B;
  d.drive_amplitude = params.A;
  d.omega = params.omega;
  return d;
}

std::vector<GaussianMoments> propagate_moments(const LinearDynamics& dyn, double D,
                                               const GaussianMoments& m0, double t0,
                                               std::span<const double> times) {
  namespace odeint = boost::numeric::odeint;
  if (!(D >= 0.0)) throw ConfigError("D", "must be >= 0");
  require_pd(m0);
  State s = pack(m0);
  double t = t0;
  std::vector<GaussianMoments> out;
  out.reserve(times.size());
  auto stepper = odeint::make_controlled(kTolerance, kTolerance,
                                           odeint::runge_kutta_dopri5<State>());
  const MomentFlow flow{dyn, D};
  for (double target : times) {
    if (target < t) throw DataError("propagate_moments: times must be non-decreasing");
    if (target > t) {
      odeint::integrate_adaptive(stepper, flow, s, t, target, std::min(1e-3, target - t));
      t = target;
    }
    out.push_back(unpack(s));
  }
  return out;
}

GaussianMoments propagate_moments(const LinearDynamics& dyn, double D, const GaussianMoments& m0,
                                  double t0, double t1) {
  const double times[1] = {t1};
  return propagate_moments(dyn, D, m0, t0, times).front();
}

double gaussian_purity(const GaussianMoments& m, double hbar) {
  require_pd(m);
  return hbar / (2.0 * std::sqrt(m.det()));
}

double gaussian_chi2_p(const GaussianMoments& m) {
  require_pd(m);
  return m.sxx / (2.0 * m.det());
}

double gaussian_chi2_full(const GaussianMoments& m) {
  require_pd(m);
  return (m.sxx + m.spp) / (2.0 * m.det());
}

}  // namespace wigner
