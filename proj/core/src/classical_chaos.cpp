#include "wigner/classical_chaos.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "wigner/errors.hpp"

namespace wigner {

namespace {

using State4 = std::array<double, 4>;  // x, p, dx, dp

double curvature(const DuffingParams& params, double x) {
  return -2.0 * params.B + 6.0 * params.C * x * x;
}

State4 tangent_rhs(const DuffingParams& params, const State4& s, double t) {
  return {s[1] / params.m, -force_gradient(params, s[0], t), s[3] / params.m,
          -curvature(params, s[0]) * s[2]};
}

State4 rk4_tangent(const DuffingParams& params, const State4& s, double t, double dt) {
  auto axpy = [](const State4& a, double h, const State4& k) {
    return State4{a[0] + h * k[0], a[1] + h * k[1], a[2] + h * k[2], a[3] + h * k[3]};
  };
  const State4 k1 = tangent_rhs(params, s, t);
  const State4 k2 = tangent_rhs(params, axpy(s, 0.5 * dt, k1), t + 0.5 * dt);
  const State4 k3 = tangent_rhs(params, axpy(s, 0.5 * dt, k2), t + 0.5 * dt);
  const State4 k4 = tangent_rhs(params, axpy(s, dt, k3), t + dt);
  State4 out;
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

double default_dt(const DuffingParams& params, double dt) {
  if (dt > 0.0) return dt;
  const double period = params.drive_period();
  return period > 0.0 ? period / 4096.0 : 1e-3;
}

}  // namespace

double energy(const DuffingParams& params, PhasePoint s, double t) {
  return 0.5 * s.p * s.p / params.m + potential(params, s.x, t);
}

PhasePoint rk4_step(const DuffingParams& params, PhasePoint s, double t, double dt) {
  auto f = [&](double x, double p, double tt) {
    return PhasePoint{p / params.m, -force_gradient(params, x, tt)};
  };
  const PhasePoint k1 = f(s.x, s.p, t);
  const PhasePoint k2 = f(s.x + 0.5 * dt * k1.x, s.p + 0.5 * dt * k1.p, t + 0.5 * dt);
  const PhasePoint k3 = f(s.x + 0.5 * dt * k2.x, s.p + 0.5 * dt * k2.p, t + 0.5 * dt);
  const PhasePoint k4 = f(s.x + dt * k3.x, s.p + dt * k3.p, t + dt);
  return {s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.p + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p)};
}

std::vector<TrajectorySample> integrate_trajectory(const DuffingParams& params, double x0,
                                                   double p0, double t0, double t1, double dt,
                                                   std::size_t sample_every) {
  params.validate();
  if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
  if (sample_every == 0) sample_every = 1;
  const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
  std::vector<TrajectorySample> out;
  out.reserve(steps / sample_every + 2);
  PhasePoint s{x0, p0};
  out.push_back({t0, s.x, s.p});
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = t0 + static_cast<double>(n) * dt;
    s = rk4_step(params, s, t, dt);
    if (!std::isfinite(s.x) || !std::isfinite(s.p)) {
      throw NumericalError("trajectory blew up", n, t + dt);
    }
    if ((n + 1) % sample_every == 0 || n + 1 == steps) {
      out.push_back({t0 + static_cast<double>(n + 1) * dt, s.x, s.p});
    }
  }
  return out;
}

LyapunovResult max_lyapunov(const DuffingParams& params, double x0, double p0,
                            const LyapunovOptions& opts) {
  params.validate();
  if (!(opts.renorm_interval > 0.0)) {
    throw ConfigError("lyapunov.renorm_interval", "must be positive");
  }
  if (!(opts.t_total > opts.renorm_interval)) {
    throw ConfigError("lyapunov.t_total", "must exceed the renormalization interval");
  }
  const double dt = default_dt(params, opts.dt);
  const auto per_interval =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opts.renorm_interval / dt)));
  const auto intervals = static_cast<std::size_t>(
      std::llround(opts.t_total / (static_cast<double>(per_interval) * dt)));

  LyapunovResult result;
  result.ic = {x0, p0};
  result.phase = std::fmod(params.omega * opts.t0, 2.0 * std::numbers::pi);
  result.finite_time_series.reserve(intervals);

  State4 s{x0, p0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  double log_sum = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < intervals; ++k) {
    for (std::size_t i = 0; i < per_interval; ++i, ++n) {
      s = rk4_tangent(params, s, opts.t0 + static_cast<double>(n) * dt, dt);
    }
    const double norm = std::hypot(s[2], s[3]);
    if (!std::isfinite(norm) || !std::isfinite(s[0]) || !std::isfinite(s[1])) {
      throw NumericalError("max_lyapunov: non-finite state", n);
    }
    if (norm == 0.0) throw NumericalError("max_lyapunov: degenerate tangent vector", n);
    s[2] /= norm;
    s[3] /= norm;
    log_sum += std::log(norm);
    const double elapsed = static_cast<double>(n) * dt;
    result.finite_time_series.emplace_back(opts.t0 + elapsed, log_sum / elapsed);
  }
  result.lambda_max = result.finite_time_series.back().second;

  const std::size_t from = result.finite_time_series.size() * 3 / 4;
  const std::size_t count = result.finite_time_series.size() - from;
  double sum = 0.0, sq = 0.0;
  for (std::size_t k = from; k < result.finite_time_series.size(); ++k) {
    sum += result.finite_time_series[k].second;
  }
  result.last_quarter_mean = sum / static_cast<double>(count);
  for (std::size_t k = from; k < result.finite_time_series.size(); ++k) {
    const double d = result.finite_time_series[k].second - result.last_quarter_mean;
    sq += d * d;
  }
  result.last_quarter_std = std::sqrt(sq / static_cast<double>(count));
  return result;
}

EnsembleLyapunov ensemble_lyapunov(const DuffingParams& params, const GaussianInit& init,
                                   std::size_t count, const LyapunovOptions& opts,
                                   std::uint64_t seed, std::size_t workers) {
  if (count == 0) throw ConfigError("lyapunov.ensemble", "must be >= 1");
  std::vector<PhasePoint> ics;
  ics.reserve(count);
  ics.push_back({init.x0, init.p0});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double sx = std::sqrt(init.var_x);
  const double sp = std::sqrt(init.var_p);
  while (ics.size() < count) {
    const double r = std::sqrt(unit(rng));
    const double a = 2.0 * std::numbers::pi * unit(rng);
    ics.push_back({init.x0 + sx * r * std::cos(a), init.p0 + sp * r * std::sin(a)});
  }

  EnsembleLyapunov out;
  out.members.resize(count);
  workers = std::max<std::size_t>(1, std::min(workers, count));
  std::vector<std::exception_ptr> errors(count);
  auto work = [&](std::size_t w) {
    for (std::size_t k = w; k < count; k += workers) {
      try {
        out.members[k] = max_lyapunov(params, ics[k].x, ics[k].p, opts);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double sum = 0.0;
  for (const auto& m : out.members) sum += m.lambda_max;
  out.mean = sum / static_cast<double>(count);
  double sq = 0.0;
  for (const auto& m : out.members) sq += (m.lambda_max - out.mean) * (m.lambda_max - out.mean);
  out.stddev = count > 1 ? std::sqrt(sq / static_cast<double>(count - 1)) : 0.0;
  return out;
}

}  // namespace wigner
