// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: wigner_acceptance [--expect-fail N]... [criterion numbers...]   (default: all)
// An expected failure is still printed as FAIL but does not set the exit status.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wigner/classical_chaos.hpp"
#include "wigner/diagnostics.hpp"
#include "wigner/errors.hpp"
#include "wigner/experiments.hpp"
#include "wigner/gaussian_oracle.hpp"
#include "wigner/potentials.hpp"
#include "wigner/propagator.hpp"
#include "wigner/states.hpp"

using namespace wigner;

namespace {

const DuffingParams kDuffing{};
const DuffingParams kHarmonic{1.0, -0.5, 0.0, 0.0, 0.0};
const double kPeriod = kDuffing.drive_period();

// Physics runs: 1024^2 on the default box, dt = T/1024, a record every 16 steps.
GridSpec physics_grid() {
  GridSpec g;
  g.nx = 1024;
  g.np = 1024;
  return g;
}

EvolutionParams physics_evolution(double hbar, double D, double t_final, Dynamics mode) {
  EvolutionParams e;
  e.hbar = hbar;
  e.D = D;
  e.dt = kPeriod / 1024.0;
  e.t_final = t_final;
  e.mode = mode;
  e.record_every = 16;
  return e;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_abs_mass = 0.0;
std::size_t runs_done = 0;

Series track(Series s) {
  for (const auto& r : s) max_abs_mass = std::max(max_abs_mass, std::abs(r.mass_residual));
  ++runs_done;
  return s;
}

EvolveResult run(const GridSpec& grid, const GaussianInit& init, const EvolutionParams& evo,
                 const DuffingParams& h) {
  auto r = evolve(gaussian_wigner(init, evo.hbar, make_grid(grid)), evo, h);
  r.series = track(std::move(r.series));
  return r;
}

// Shared runs, computed on first use.
std::optional<SweepResult> sweep_cache;
std::optional<Series> fig1_classical_cache;
std::optional<EnsembleLyapunov> lyap_cache;

const SweepResult& figure2_sweep() {
  if (!sweep_cache) {
    SweepConfig cfg;
    cfg.hamiltonian = kDuffing;
    cfg.grid = physics_grid();
    cfg.initial = GaussianInit{1.0, 0.0, 0.05, 0.0};
    cfg.evolution = physics_evolution(0.1, 5e-4, 20.0 * kPeriod, Dynamics::quantum);
    cfg.groups = figure2_groups();
    cfg.workers = 1;
    sweep_cache = run_sweep(cfg, [](const RunOutcome& r) {
      std::fprintf(stderr, "  sweep run hbar=%g D=%g %s\n", r.pair.hbar, r.pair.D,
                   r.error ? r.error->c_str() : "done");
    });
    for (auto& r : sweep_cache->runs) r.series = track(std::move(r.series));
  }
  return *sweep_cache;
}

// The entropy-rate case (hbar = 0.1, D = 5e-4, quantum) is the first member of the
// first scaling group; reuse that run.
const Series& fig1_quantum() {
  for (const auto& r : figure2_sweep().runs) {
    if (r.pair.hbar == 0.1 && r.pair.D == 5e-4) {
      if (r.error) throw NumericalError("entropy-rate run failed: " + *r.error);
      return r.series;
    }
  }
  throw DataError("entropy-rate run missing from the sweep");
}

const Series& fig1_classical() {
  if (!fig1_classical_cache) {
    const auto init = GaussianInit::minimum_uncertainty(1.0, 0.0, 0.05, 0.1);
    fig1_classical_cache =
        run(physics_grid(), init, physics_evolution(0.1, 5e-4, 15.5, Dynamics::classical), kDuffing).series;
  }
  return *fig1_classical_cache;
}

LyapunovOptions lyapunov_options() {
  LyapunovOptions o;
  o.t_total = 5000.0;
  o.renorm_interval = 1.0;
  o.dt = kPeriod / 4096.0;
  return o;
}

const EnsembleLyapunov& fig1_lyapunov() {
  if (!lyap_cache) {
    lyap_cache = ensemble_lyapunov(kDuffing, GaussianInit::minimum_uncertainty(1.0, 0.0, 0.05, 0.1),
                                   16, lyapunov_options());
  }
  return *lyap_cache;
}

// Harmonic oracle comparison: max relative purity error over t in [0, 10].
double oracle_purity_error(double D, double dt) {
  const double hbar = 0.1;
  const GaussianInit init = GaussianInit::minimum_uncertainty(1.0, 0.0, 0.05, hbar);
  EvolutionParams e;
  e.hbar = hbar;
  e.D = D;
  e.dt = dt;
  e.t_final = 10.0;
  e.record_every = static_cast<std::size_t>(std::llround(0.1 / dt));
  const auto series = run(GridSpec{}, init, e, kHarmonic).series;
  std::vector<double> times;
  for (const auto& r : series) times.push_back(r.t);
  const auto m = propagate_moments(LinearDynamics::from_duffing(kHarmonic), D,
                                   GaussianMoments::from_init(init), 0.0, times);
  double worst = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double ref = gaussian_purity(m[i], hbar);
    worst = std::max(worst, std::abs(series[i].purity - ref) / ref);
  }
  return worst;
}

std::map<double, double> oracle_cache;

double oracle_error_cached(double D, double dt) {
  const double key = D * 1e6 + dt;
  auto it = oracle_cache.find(key);
  if (it != oracle_cache.end()) return it->second;
  return oracle_cache[key] = oracle_purity_error(D, dt);
}

Outcome criterion1() {
  const double e0 = oracle_error_cached(0.0, 1e-3);
  const double e1 = oracle_error_cached(1e-3, 1e-3);
  return {e0 <= 0.005 && e1 <= 0.005,
          fmt("harmonic purity vs oracle, max rel error D=0: %.3e, D=1e-3: %.3e (tol 5e-3)", e0, e1)};
}

Outcome criterion3() {
  auto window_max = [](const Series& full) {
    const auto s = uniform_prefix(full);
    const auto res = identity_residual(s, 5e-4);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i].t >= 2.0 && s[i].t <= 15.0) worst = std::max(worst, std::abs(res[i - 1]));
    }
    return worst;
  };
  const double q = window_max(fig1_quantum());
  const double c = window_max(fig1_classical());
  return {q <= 0.02 && c <= 0.02,
          fmt("identity residual on t in [2,15]: quantum %.3e, classical %.3e (tol 2e-2)", q, c)};
}

Outcome criterion4() {
  const double D = 1e-3;
  const double coarse = oracle_error_cached(D, 1e-3);
  const double fine = oracle_error_cached(D, 5e-4);
  const double ratio = coarse / fine;
  return {ratio >= 3.4 && ratio <= 4.6,
          fmt("purity error dt=1e-3: %.3e, dt=5e-4: %.3e, ratio %.3f (want [3.4, 4.6])", coarse, fine,
              ratio)};
}

Outcome criterion5() {
  const Series& s = fig1_quantum();
  PlateauOptions o;
  o.max_relative_slope = 0.1;
  o.min_length = 2.0 * kPeriod;
  const auto fit = fit_metastable(s, {5.0, 15.0}, 5e-4, o);
  if (!fit) return {false, "no plateau of two drive periods with relative slope < 10%/unit time in [5, 15]"};
  const double lam = fig1_lyapunov().mean;
  const double identity_gap = std::abs(fit->entropy_rate - fit->lambda_fit) / fit->lambda_fit;
  const double ratio = fit->lambda_fit / lam;
  const bool pass = identity_gap <= 0.02 && ratio >= 0.5 && ratio <= 2.0;
  return {pass, fmt("plateau [%.2f, %.2f], slope %.3f/unit t; -dS2/dt = %.4f, 2 D chi2* = %.4f "
                    "(gap %.2e); lambda_max = %.4f, ratio %.3f (want [0.5, 2])",
                    fit->window.lo, fit->window.hi, fit->relative_slope, fit->entropy_rate,
                    fit->lambda_fit, identity_gap, lam, ratio)};
}

Outcome criterion6() {
  const SweepResult& sw = figure2_sweep();
  if (!sw.complete()) return {false, "sweep incomplete"};
  const TimeWindow w{0.0, 10.0 * kPeriod};
  std::string detail = "within-group max|dS|:";
  double max_within = 0.0;
  bool ok = true;
  for (std::size_t g = 0; g < sw.groups.size(); ++g) {
    const double m = collapse_metric(sw.group_series(g), w);
    detail += fmt(" z=%g %.3f", sw.groups[g].zeta0, m);
    ok = ok && m <= 0.1;
    max_within = std::max(max_within, m);
  }
  double min_cross = INFINITY;
  detail += "; cross-group min|dS|:";
  for (std::size_t a = 0; a < sw.groups.size(); ++a) {
    for (std::size_t b = a + 1; b < sw.groups.size(); ++b) {
      const double m = cross_group_separation(sw.group_series(a), sw.group_series(b), w);
      detail += fmt(" (%g,%g) %.3f", sw.groups[a].zeta0, sw.groups[b].zeta0, m);
      min_cross = std::min(min_cross, m);
    }
  }
  ok = ok && min_cross > max_within;
  return {ok, detail + " (tol 0.1, cross > within)"};
}

Outcome criterion7() {
  const SweepResult& sw = figure2_sweep();
  if (!sw.complete()) return {false, "sweep incomplete"};
  std::string detail = "median P/P0 at 10 periods:";
  bool ordered = true;
  double prev = -1.0;
  for (std::size_t g = 0; g < sw.groups.size(); ++g) {
    const double m = group_median_normalized_purity(sw.group_series(g), 10.0 * kPeriod);
    detail += fmt(" z=%g %.4f", sw.groups[g].zeta0, m);
    ordered = ordered && m > prev;
    prev = m;
  }
  const TimeWindow early{0.0, 5.0 * kPeriod};
  const TimeWindow late{15.0 * kPeriod, 20.0 * kPeriod};
  bool spread = true;
  detail += "; spread early/late:";
  for (std::size_t g = 0; g < sw.groups.size(); ++g) {
    const double e = collapse_metric(sw.group_series(g), early);
    const double l = collapse_metric(sw.group_series(g), late);
    detail += fmt(" z=%g %.3f/%.3f", sw.groups[g].zeta0, e, l);
    spread = spread && l > e;
  }
  return {ordered && spread, detail};
}

Outcome criterion2() {
  // Unitary Duffing run; mass is checked over every run made so far.
  const auto init = GaussianInit::minimum_uncertainty(1.0, 0.0, 0.05, 0.1);
  EvolutionParams e;
  e.hbar = 0.1;
  e.D = 0.0;
  e.dt = kPeriod / 1024.0;
  e.t_final = 10.0 * kPeriod;
  e.record_every = 64;
  const auto s = run(GridSpec{}, init, e, kDuffing).series;
  double drift = 0.0;
  for (const auto& r : s) drift = std::max(drift, std::abs(r.purity - s.front().purity));
  return {drift <= 5e-4 && max_abs_mass <= 1e-8,
          fmt("D=0 purity drift over 10 periods %.3e (tol 5e-4); max mass drift over %zu runs %.3e "
              "(tol 1e-8)",
              drift, runs_done, max_abs_mass)};
}

Outcome criterion8() {
  const double t = 2.0;
  const double D = 5e-4;
  // One fixed initial state for all hbar: pure at hbar = 0.2, mixed below.
  const GaussianInit init{1.0, 0.0, 0.05, 0.2};
  std::vector<double> lx, ly;
  std::string detail = "L2(quantum - classical) at t=2:";
  for (double hbar : {0.05, 0.1, 0.2}) {
    const auto q = run(physics_grid(), init, physics_evolution(hbar, D, t, Dynamics::quantum), kDuffing);
    const auto c = run(physics_grid(), init, physics_evolution(hbar, D, t, Dynamics::classical), kDuffing);
    const double d = l2_distance(q.final_field, c.final_field);
    detail += fmt(" hbar=%g %.4e", hbar, d);
    lx.push_back(std::log(hbar));
    ly.push_back(std::log(d));
  }
  const double mx = (lx[0] + lx[1] + lx[2]) / 3.0;
  const double my = (ly[0] + ly[1] + ly[2]) / 3.0;
  double sxx = 0.0, sxy = 0.0;
  for (int k = 0; k < 3; ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  const double slope = sxy / sxx;
  return {std::abs(slope - 2.0) <= 0.3, detail + fmt("; log-log slope %.3f (want 2 +- 0.3)", slope)};
}

Outcome criterion9() {
  std::mt19937_64 rng(20050101);
  std::uniform_real_distribution<double> ux(-6.0, 6.0), ul(-60.0, 60.0), ut(0.0, 100.0),
      uh(0.01, 1.0), uc(0.1, 5.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    DuffingParams p = kDuffing;
    p.C = uc(rng);
    const double hbar = uh(rng), x = ux(rng), lam = ul(rng), t = ut(rng);
    const double diff = moyal_kernel(p, hbar, x, lam, t) - classical_kernel(p, x, lam, t);
    const double expect = 0.5 * p.C * hbar * hbar * x * lam * lam * lam;
    const double scale = std::abs(moyal_kernel(p, hbar, x, lam, t)) + std::abs(expect) + 1.0;
    worst = std::max(worst, std::abs(diff - expect) / scale);
  }
  return {worst <= 8.0 * std::numeric_limits<double>::epsilon(),
          fmt("max |(K_q - K_c) - (C/2) hbar^2 x lam^3| / scale over 1e4 samples: %.2e", worst)};
}

Outcome criterion10() {
  const auto init = GaussianInit::minimum_uncertainty(1.0, 0.0, 0.05, 0.1);
  const double base = fig1_lyapunov().mean;
  LyapunovOptions half = lyapunov_options();
  half.dt *= 0.5;
  LyapunovOptions longer = lyapunov_options();
  longer.renorm_interval *= 2.0;
  const double l_half = ensemble_lyapunov(kDuffing, init, 16, half).mean;
  const double l_renorm = ensemble_lyapunov(kDuffing, init, 16, longer).mean;
  DuffingParams undriven = kDuffing;
  undriven.A = 0.0;
  const double l_control = ensemble_lyapunov(undriven, init, 16, lyapunov_options()).mean;
  const double d1 = std::abs(l_half / base - 1.0);
  const double d2 = std::abs(l_renorm / base - 1.0);
  const bool pass = base > 0.0 && d1 <= 0.1 && d2 <= 0.1 && std::abs(l_control) <= 0.02;
  return {pass, fmt("lambda_max %.4f; dt/2 %.4f (%+.1f%%); renorm x2 %.4f (%+.1f%%); A=0 control %.4f",
                    base, l_half, 100.0 * (l_half / base - 1.0), l_renorm,
                    100.0 * (l_renorm / base - 1.0), l_control)};
}

}  // namespace

int main(int argc, char** argv) {
  // Criterion 2 runs last so that its mass check covers every other run.
  const std::vector<std::pair<int, std::function<Outcome()>>> all = {
      {9, criterion9}, {1, criterion1}, {4, criterion4},  {8, criterion8}, {6, criterion6},
      {7, criterion7}, {3, criterion3}, {5, criterion5},  {10, criterion10}, {2, criterion2}};
  std::set<int> selected;
  std::set<int> expected_fail;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      expected_fail.insert(std::atoi(argv[++i]));
    } else {
      selected.insert(std::atoi(argv[i]));
    }
  }

  int failures = 0;
  for (const auto& [id, fn] : all) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s [%.0f s]\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass && !expected_fail.count(id)) ++failures;
    if (expected_fail.count(id)) {
      std::printf("  (criterion %d is a known failure; %s)\n", id,
                  o.pass ? "it passed unexpectedly" : "not counted");
    }
  }
  return failures == 0 ? 0 : 1;
}
