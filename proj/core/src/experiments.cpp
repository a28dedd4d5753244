#include "wigner/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "wigner/errors.hpp"

namespace wigner {

Regime classify_regime(double zeta0, const RegimeThresholds& thresholds) {
  if (zeta0 < thresholds.zeta_c) return Regime::classical;
  if (zeta0 >= thresholds.zeta_q) return Regime::quantum;
  return Regime::semi_classical;
}

std::string_view regime_label(Regime r) {
  switch (r) {
    case Regime::classical:
      return "I";
    case Regime::semi_classical:
      return "II";
    case Regime::quantum:
      return "III";
  }
  return "?";
}

std::vector<HbarD> ScalingGroup::off_scale_members() const {
  std::vector<HbarD> out;
  for (const auto& m : members) {
    if (std::abs(m.zeta0() / zeta0 - 1.0) > 1e-9) out.push_back(m);
  }
  return out;
}

void ScalingGroup::validate(bool strict) const {
  if (!(zeta0 > 0.0)) throw ConfigError("sweep.groups.zeta0", "must be positive");
  if (members.empty()) throw ConfigError("sweep.groups.members", "group has no members");
  for (const auto& m : members) {
    if (!(m.hbar > 0.0) || !(m.D > 0.0)) {
      throw ConfigError("sweep.groups.members", "hbar and D must be positive");
    }
    if (strict && std::abs(m.zeta0() / zeta0 - 1.0) > 1e-9) {
      throw ConfigError("sweep.groups.members",
                        "hbar^2/D = " + format_double(m.zeta0()) + " does not match zeta0 " +
                            format_double(zeta0));
    }
  }
}

std::vector<ScalingGroup> figure2_groups(const RegimeThresholds& thresholds) {
  std::vector<ScalingGroup> groups = {
      {2.0, {{0.1, 5e-4}, {0.2, 2e-2}, {0.5, 0.125}}, {}},
      {40.0, {{std::sqrt(0.004), 1e-4}, {0.1, 2.5e-4}, {0.2, 1e-3}}, {}},
      {100.0, {{0.1, 1e-4}, {0.5, 2.5e-3}, {1.0, 1e-2}}, {}},
  };
  for (auto& g : groups) g.label = classify_regime(g.zeta0, thresholds);
  return groups;
}

bool SweepResult::complete() const {
  return std::all_of(runs.begin(), runs.end(), [](const RunOutcome& r) { return !r.error; });
}

std::vector<const Series*> SweepResult::group_series(std::size_t group) const {
  std::vector<const Series*> out;
  for (const auto& r : runs) {
    if (r.group == group && !r.error) out.push_back(&r.series);
  }
  return out;
}

SweepResult run_sweep(const SweepConfig& config,
                      const std::function<void(const RunOutcome&)>& on_done) {
  config.hamiltonian.validate();
  config.grid.validate();
  for (const auto& g : config.groups) g.validate(config.strict_zeta0);

  SweepResult result;
  result.grid = config.grid;
  result.dt = config.evolution.dt;
  result.groups = config.groups;
  for (std::size_t gi = 0; gi < config.groups.size(); ++gi) {
    for (const auto& m : config.groups[gi].members) {
      RunOutcome r;
      r.group = gi;
      r.pair = m;
      result.runs.push_back(std::move(r));
    }
  }

  const GridPtr grid = make_grid(config.grid);
  std::mutex done_mutex;
  auto run_one = [&](RunOutcome& out) {
    try {
      EvolutionParams evo = config.evolution;
      evo.hbar = out.pair.hbar;
      evo.D = out.pair.D;
      evo.mode = Dynamics::quantum;
      GaussianInit init = config.initial;
      if (!config.fixed_var_p) {
        init = GaussianInit::minimum_uncertainty(init.x0, init.p0, init.var_x, evo.hbar);
      }
      out.series = evolve(gaussian_wigner(init, evo.hbar, grid), evo, config.hamiltonian).series;
    } catch (const Error& e) {
      out.error = e.what();
    }
    if (on_done) {
      std::lock_guard lock(done_mutex);
      on_done(out);
    }
  };

  const std::size_t n = result.runs.size();
  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (auto& r : result.runs) run_one(r);
  } else {
    std::mutex queue_mutex;
    std::size_t next = 0;
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t k;
          {
            std::lock_guard lock(queue_mutex);
            if (next == n) return;
            k = next++;
          }
          run_one(result.runs[k]);
        }
      });
    }
  }
  return result;
}

std::vector<double> relative_entropy(const Series& s) {
  std::vector<double> out;
  out.reserve(s.size());
  if (s.empty()) return out;
  for (const auto& r : s) out.push_back(r.s2 - s.front().s2);
  return out;
}

namespace {

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

bool inside(double t, TimeWindow w) { return t >= w.lo - 1e-12 && t <= w.hi + 1e-12; }

}  // namespace

double pair_distance(const Series& a, const Series& b, TimeWindow window) {
  if (a.empty() || b.empty()) throw DataError("pair_distance: empty series");
  const std::size_t n = std::min(a.size(), b.size());
  double worst = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!same_time(a[i].t, b[i].t)) {
      throw DataError("pair_distance: sample times differ at index " + std::to_string(i));
    }
    if (!inside(a[i].t, window)) continue;
    any = true;
    const double sa = a[i].s2 - a.front().s2;
    const double sb = b[i].s2 - b.front().s2;
    worst = std::max(worst, std::abs(sa - sb));
  }
  if (!any) throw DataError("pair_distance: no common samples inside the window");
  return worst;
}

double collapse_metric(std::span<const Series* const> group, TimeWindow window) {
  if (group.size() < 2) throw DataError("collapse_metric: need at least two runs");
  double worst = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (std::size_t j = i + 1; j < group.size(); ++j) {
      worst = std::max(worst, pair_distance(*group[i], *group[j], window));
    }
  }
  return worst;
}

double cross_group_separation(std::span<const Series* const> a,
                              std::span<const Series* const> b, TimeWindow window) {
  if (a.empty() || b.empty()) throw DataError("cross_group_separation: empty group");
  double best = std::numeric_limits<double>::infinity();
  for (const Series* sa : a) {
    for (const Series* sb : b) best = std::min(best, pair_distance(*sa, *sb, window));
  }
  return best;
}

double normalized_purity_at(const Series& s, double t) {
  if (s.empty()) throw DataError("normalized_purity_at: empty series");
  if (t < s.front().t || t > s.back().t + 1e-12) {
    throw DataError("normalized_purity_at: time " + format_double(t) + " outside the series");
  }
  const double p0 = s.front().purity;
  auto it = std::lower_bound(s.begin(), s.end(), t,
                             [](const DiagnosticsRecord& r, double v) { return r.t < v; });
  if (it == s.end()) return s.back().purity / p0;
  if (it == s.begin() || same_time(it->t, t)) return it->purity / p0;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  return ((1.0 - w) * lo.purity + w * hi.purity) / p0;
}

double group_median_normalized_purity(std::span<const Series* const> group, double t) {
  if (group.empty()) throw DataError("group_median_normalized_purity: empty group");
  std::vector<double> v;
  for (const Series* s : group) v.push_back(normalized_purity_at(*s, t));
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

// Prefix sums for O(1) least-squares slopes over index ranges.
struct Regression {
  std::vector<double> st, stt, sy, sty;

  explicit Regression(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    st.assign(n + 1, 0.0);
    stt.assign(n + 1, 0.0);
    sy.assign(n + 1, 0.0);
    sty.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      st[i + 1] = st[i] + t[i];
      stt[i + 1] = stt[i] + t[i] * t[i];
      sy[i + 1] = sy[i] + y[i];
      sty[i + 1] = sty[i] + t[i] * y[i];
    }
  }

  double mean(std::size_t i, std::size_t j) const {
    return (sy[j + 1] - sy[i]) / static_cast<double>(j + 1 - i);
  }

  // Slope over the inclusive range [i, j], divided by the mean.
  double relative_slope(std::size_t i, std::size_t j) const {
    const double n = static_cast<double>(j + 1 - i);
    const double mt = (st[j + 1] - st[i]) / n;
    const double my = (sy[j + 1] - sy[i]) / n;
    const double vtt = (stt[j + 1] - stt[i]) / n - mt * mt;
    const double vty = (sty[j + 1] - sty[i]) / n - mt * my;
    if (vtt <= 0.0 || my == 0.0) return std::numeric_limits<double>::infinity();
    return (vty / vtt) / my;
  }
};

}  // namespace

std::optional<MetastableFit> fit_metastable(const Series& s, TimeWindow search, double D,
                                            const PlateauOptions& opts) {
  std::vector<double> t, chi, rate;
  for (const auto& r : s) {
    if (inside(r.t, search)) {
      t.push_back(r.t);
      chi.push_back(r.chi2_p);
      rate.push_back(-r.s2_rate);
    }
  }
  if (t.size() < 3) return std::nullopt;
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  const auto span = static_cast<std::size_t>(std::ceil(opts.min_length / h - 1e-9));
  if (span < 2 || span >= t.size()) return std::nullopt;

  const Regression reg(t, chi);
  const std::size_t starts = t.size() - span;
  std::vector<bool> ok(starts);
  for (std::size_t i = 0; i < starts; ++i) {
    ok[i] = std::abs(reg.relative_slope(i, i + span)) < opts.max_relative_slope;
  }

  // Longest run of consecutive qualifying sub-windows whose union also
  // qualifies as a whole; earliest wins ties.
  std::optional<std::pair<std::size_t, std::size_t>> best;
  std::size_t i = 0;
  while (i < starts) {
    if (!ok[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < starts && ok[j + 1]) ++j;
    // Trim from the end until the union passes as a whole.
    std::size_t last = j;
    while (last > i && std::abs(reg.relative_slope(i, last + span)) >= opts.max_relative_slope) {
      --last;
    }
    const std::size_t lo = i, hi = last + span;
    if (!best || hi - lo > best->second - best->first) best = std::make_pair(lo, hi);
    i = j + 1;
  }
  if (!best) return std::nullopt;

  MetastableFit fit;
  const auto [lo, hi] = *best;
  fit.window = {t[lo], t[hi]};
  fit.chi2_star = reg.mean(lo, hi);
  fit.lambda_fit = 2.0 * D * fit.chi2_star;
  fit.relative_slope = reg.relative_slope(lo, hi);
  double sum = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) sum += rate[k];
  fit.entropy_rate = sum / static_cast<double>(hi + 1 - lo);
  return fit;
}

std::optional<FirstOrderFit> fit_first_order(std::span<const std::pair<double, double>> zeta_lambda) {
  const std::size_t n = zeta_lambda.size();
  if (n < 2) return std::nullopt;
  double mz = 0.0, ml = 0.0;
  for (const auto& [z, l] : zeta_lambda) {
    mz += z;
    ml += l;
  }
  mz /= static_cast<double>(n);
  ml /= static_cast<double>(n);
  double szz = 0.0, szl = 0.0;
  for (const auto& [z, l] : zeta_lambda) {
    szz += (z - mz) * (z - mz);
    szl += (z - mz) * (l - ml);
  }
  if (szz <= 1e-12 * std::max(1.0, mz * mz)) return std::nullopt;
  const double slope = szl / szz;
  FirstOrderFit fit;
  fit.lambda = ml - slope * mz;
  fit.a = fit.lambda != 0.0 ? 4.0 * slope / fit.lambda : 0.0;
  fit.runs = n;
  return fit;
}

}  // namespace wigner
