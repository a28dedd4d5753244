#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <span>

#include "json.hpp"
#include "wigner/classical_chaos.hpp"
#include "wigner/config.hpp"
#include "wigner/diagnostics.hpp"
#include "wigner/errors.hpp"
#include "wigner/experiments.hpp"
#include "wigner/gaussian_oracle.hpp"
#include "wigner/propagator.hpp"
#include "wigner/states.hpp"

namespace wigner::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

RunConfig resolve(const CommonOptions& opts) {
  // Flags become overrides so that the provenance header records them.
  std::vector<std::string> overrides = opts.overrides;
  if (opts.out_dir) overrides.push_back("output.dir=" + json(*opts.out_dir).dump());
  if (opts.workers) overrides.push_back("workers=" + std::to_string(*opts.workers));
  if (opts.config_path.empty()) return parse_config("", overrides);
  return load_config(opts.config_path, overrides);
}

fs::path prepare_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("output.dir", "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("output.dir", "cannot write " + path.string());
  return out;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(); }

void write_summary(const fs::path& path, const json& summary) {
  auto out = open_out(path);
  out << summary.dump(2) << "\n";
  std::cout << summary.dump(2) << "\n";
}

std::string run_file_name(const RunConfig& cfg, std::size_t group, std::size_t member) {
  return cfg.output.prefix + "_g" + std::to_string(group) + "_m" + std::to_string(member) + ".csv";
}

std::size_t member_index(const ScalingGroup& g, const HbarD& pair) {
  for (std::size_t k = 0; k < g.members.size(); ++k) {
    if (g.members[k].hbar == pair.hbar && g.members[k].D == pair.D) return k;
  }
  return g.members.size();
}

json metastable_json(const std::optional<MetastableFit>& fit) {
  if (!fit) return json();
  return {{"chi2_star", fit->chi2_star},
          {"lambda_fit", fit->lambda_fit},
          {"entropy_rate", fit->entropy_rate},
          {"relative_slope", fit->relative_slope},
          {"window", {fit->window.lo, fit->window.hi}}};
}

std::optional<MetastableFit> try_fit(const RunConfig& cfg, const Series& s, double D) {
  if (!(D > 0.0)) return std::nullopt;
  const double period = cfg.hamiltonian.drive_period();
  PlateauOptions po;
  po.min_length = cfg.sweep.plateau_min_periods * period;
  try {
    return fit_metastable(s, {cfg.sweep.plateau_search_lo, cfg.sweep.plateau_search_hi}, D, po);
  } catch (const DataError&) {
    return std::nullopt;
  }
}

// Collapse, separation and ordering metrics over a set of finished runs.
json analyse(const RunConfig& cfg, const SweepResult& result, const fs::path& dir) {
  const double T = cfg.hamiltonian.drive_period();
  const auto& sw = cfg.sweep;
  const TimeWindow scaling{0.0, sw.scaling_window_periods * T};
  const TimeWindow early{sw.early_window_lo_periods * T, sw.early_window_hi_periods * T};
  const TimeWindow late{sw.late_window_lo_periods * T, sw.late_window_hi_periods * T};
  const double t_cmp = sw.comparison_time_periods * T;

  const std::size_t ng = result.groups.size();
  std::vector<std::vector<const Series*>> members(ng);
  for (std::size_t g = 0; g < ng; ++g) members[g] = result.group_series(g);

  json groups = json::array();
  json problems = json::array();
  // Metrics whose windows fall outside the recorded range are reported as null.
  auto guarded = [&](const std::string& what, auto&& f) -> std::optional<double> {
    try {
      return f();
    } catch (const DataError& e) {
      problems.push_back(what + ": " + e.what());
      return std::nullopt;
    }
  };
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(); };

  double max_within = 0.0;
  bool within_ok = true;
  bool spread_ok = true;
  std::vector<std::pair<double, double>> medians;
  for (std::size_t g = 0; g < ng; ++g) {
    const std::string tag = "group " + std::to_string(g);
    json gj = {{"zeta0", result.groups[g].zeta0},
               {"regime", regime_label(result.groups[g].label)},
               {"runs", members[g].size()}};
    json off = json::array();
    for (const auto& m : result.groups[g].off_scale_members()) off.push_back({m.hbar, m.D, m.zeta0()});
    if (!off.empty()) gj["off_scale_members"] = off;
    if (members[g].size() >= 2) {
      const auto within = guarded(tag, [&] { return collapse_metric(members[g], scaling); });
      const auto e = guarded(tag, [&] { return collapse_metric(members[g], early); });
      const auto l = guarded(tag, [&] { return collapse_metric(members[g], late); });
      if (within) max_within = std::max(max_within, *within);
      within_ok = within_ok && within && *within <= sw.collapse_threshold;
      spread_ok = spread_ok && e && l && *l > *e;
      gj["within_group_max_dS"] = opt(within);
      gj["early_spread"] = opt(e);
      gj["late_spread"] = opt(l);
    } else {
      within_ok = false;
      spread_ok = false;
    }
    if (!members[g].empty()) {
      const auto med = guarded(tag, [&] { return group_median_normalized_purity(members[g], t_cmp); });
      gj["median_normalized_purity"] = opt(med);
      if (med) medians.emplace_back(result.groups[g].zeta0, *med);
    }
    groups.push_back(gj);
  }

  json cross = json::array();
  double min_cross = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < ng; ++a) {
    for (std::size_t b = a + 1; b < ng; ++b) {
      if (members[a].empty() || members[b].empty()) continue;
      const auto sep = guarded("groups " + std::to_string(a) + "," + std::to_string(b),
                               [&] { return cross_group_separation(members[a], members[b], scaling); });
      if (sep) min_cross = std::min(min_cross, *sep);
      cross.push_back({{"groups", {a, b}}, {"min_dS", opt(sep)}});
    }
  }

  std::sort(medians.begin(), medians.end());
  bool ordered = medians.size() == ng;
  for (std::size_t i = 1; i < medians.size(); ++i) {
    ordered = ordered && medians[i].second > medians[i - 1].second;
  }

  // Per-run plateau fits and the first-order fit of lambda_fit against zeta0.
  json runs = json::array();
  std::vector<std::pair<double, double>> zl;
  for (const auto& r : result.runs) {
    json rj = {{"group", r.group}, {"hbar", r.pair.hbar}, {"D", r.pair.D}, {"zeta0", r.pair.zeta0()}};
    if (r.error) {
      rj["error"] = *r.error;
    } else {
      const auto fit = try_fit(cfg, r.series, r.pair.D);
      rj["metastable"] = metastable_json(fit);
      if (fit) zl.emplace_back(r.pair.zeta0(), fit->lambda_fit);
    }
    runs.push_back(rj);
  }
  json first_order;
  if (const auto f = fit_first_order(zl)) {
    first_order = {{"lambda", f->lambda}, {"a", f->a}, {"runs", f->runs}};
  }

  // Plot data: normalized purity of every successful run on a common time axis.
  const Series* axis = nullptr;
  for (const auto& r : result.runs) {
    if (!r.error && (axis == nullptr || r.series.size() > axis->size())) axis = &r.series;
  }
  if (axis != nullptr) {
    auto out = open_out(dir / (cfg.output.prefix + "_normalized_purity.csv"));
    out << provenance_header(cfg, "collapse");
    out << "t";
    for (const auto& r : result.runs) {
      if (r.error) continue;
      out << ",g" << r.group << "_hbar" << format_double(r.pair.hbar) << "_D" << format_double(r.pair.D);
    }
    out << "\n";
    for (const auto& rec : *axis) {
      out << format_double(rec.t);
      for (const auto& r : result.runs) {
        if (r.error) continue;
        const bool inside = rec.t <= r.series.back().t;
        out << "," << (inside ? format_double(normalized_purity_at(r.series, rec.t)) : "");
      }
      out << "\n";
    }
  }

  const bool separated = std::isfinite(min_cross) && min_cross > max_within;
  return {{"groups", groups},
          {"cross_group", cross},
          {"max_within_group", max_within},
          {"min_cross_group", number(min_cross)},
          {"collapse_ok", within_ok && separated},
          {"ordering_ok", ordered},
          {"spread_ok", spread_ok},
          {"runs", runs},
          {"first_order_fit", first_order},
          {"problems", problems}};
}

}  // namespace

int cmd_run(const CommonOptions& opts) {
  const RunConfig cfg = resolve(opts);
  const fs::path dir = prepare_dir(cfg);
  const auto& evo = cfg.evolution;
  const std::string header = provenance_header(cfg, "run");

  auto grid = make_grid(cfg.grid);
  WignerField init = gaussian_wigner(cfg.initial_state.resolve(evo.hbar), evo.hbar, grid);

  std::ofstream csv;
  std::ofstream jsonl;
  json outputs = json::array();
  if (cfg.output.csv) {
    const fs::path p = dir / (cfg.output.prefix + ".csv");
    csv = open_out(p);
    csv << header;
    write_csv_header(csv);
    outputs.push_back(p.string());
  }
  if (cfg.output.jsonl) {
    const fs::path p = dir / (cfg.output.prefix + ".jsonl");
    jsonl = open_out(p);
    outputs.push_back(p.string());
  }

  EvolveHooks hooks;
  hooks.on_record = [&](const DiagnosticsRecord& r) {
    if (csv.is_open()) write_csv_row(csv, r);
    if (jsonl.is_open()) write_jsonl_row(jsonl, r);
  };
  std::size_t records = 0;
  if (cfg.output.checkpoint_every > 0) {
    hooks.on_snapshot = [&](const WignerField& f, double t, std::size_t step) {
      if (records++ % cfg.output.checkpoint_every != 0) return;
      char name[64];
      std::snprintf(name, sizeof name, "_step%09zu.wchk", step);
      const fs::path p = dir / (cfg.output.prefix + name);
      write_checkpoint(p.string(), f, t);
      outputs.push_back(p.string());
    };
  }

  const EvolveResult result = evolve(std::move(init), evo, cfg.hamiltonian, hooks);
  if (cfg.output.final_checkpoint) {
    const fs::path p = dir / (cfg.output.prefix + "_final.wchk");
    write_checkpoint(p.string(), result.final_field, result.series.back().t);
    outputs.push_back(p.string());
  }

  const auto& s = result.series;
  double max_mass = 0.0;
  for (const auto& r : s) max_mass = std::max(max_mass, std::abs(r.mass_residual));
  json summary = {{"command", "run"},
                  {"status", "ok"},
                  {"config_hash", config_hash(cfg)},
                  {"records", s.size()},
                  {"t_final", s.back().t},
                  {"final_purity", s.back().purity},
                  {"final_s2", s.back().s2},
                  {"final_chi2_p", s.back().chi2_p},
                  {"max_abs_mass_residual", max_mass},
                  {"outputs", outputs}};
  if (evo.D > 0.0 && evo.hbar > 0.0) {
    const double zeta0 = evo.hbar * evo.hbar / evo.D;
    summary["zeta0"] = zeta0;
    summary["regime"] = regime_label(classify_regime(zeta0, cfg.sweep.thresholds));
  }
  const auto regular = uniform_prefix(s);
  if (regular.size() >= 3) {
    const auto res = identity_residual(regular, evo.D);
    double worst = 0.0;
    for (double v : res) worst = std::max(worst, std::abs(v));
    summary["max_identity_residual"] = number(worst);
  }
  summary["metastable"] = metastable_json(try_fit(cfg, s, evo.D));
  write_summary(dir / (cfg.output.prefix + "_summary.json"), summary);
  return kExitOk;
}

int cmd_sweep(const CommonOptions& opts) {
  const RunConfig cfg = resolve(opts);
  const fs::path dir = prepare_dir(cfg);
  const SweepConfig sc = cfg.sweep_config();

  const SweepResult result = run_sweep(sc, [&](const RunOutcome& r) {
    const auto& group = sc.groups[r.group];
    const std::size_t k = member_index(group, r.pair);
    std::cerr << "sweep: zeta0=" << group.zeta0 << " hbar=" << r.pair.hbar << " D=" << r.pair.D
              << (r.error ? " failed: " + *r.error : " done") << "\n";
    if (r.error) return;
    auto out = open_out(dir / run_file_name(cfg, r.group, k));
    out << provenance_header(cfg, "sweep");
    out << "# run: group=" << r.group << " zeta0=" << format_double(group.zeta0)
        << " hbar=" << format_double(r.pair.hbar) << " D=" << format_double(r.pair.D) << "\n";
    write_csv_header(out);
    for (const auto& rec : r.series) write_csv_row(out, rec);
  });

  json summary = analyse(cfg, result, dir);
  summary["command"] = "sweep";
  summary["config_hash"] = config_hash(cfg);
  summary["status"] = result.complete() ? "ok" : "partial";
  write_summary(dir / (cfg.output.prefix + "_collapse.json"), summary);
  return result.complete() ? kExitOk : kExitPartial;
}

int cmd_collapse(const CommonOptions& opts, const std::optional<std::string>& input_dir) {
  const RunConfig cfg = resolve(opts);
  const fs::path dir = prepare_dir(cfg);
  const fs::path in_dir = input_dir ? fs::path(*input_dir) : dir;

  SweepResult result;
  result.grid = cfg.grid;
  result.dt = cfg.evolution.dt;
  result.groups = cfg.sweep.groups;
  for (std::size_t g = 0; g < result.groups.size(); ++g) {
    const auto& group = result.groups[g];
    for (std::size_t k = 0; k < group.members.size(); ++k) {
      RunOutcome r;
      r.group = g;
      r.pair = group.members[k];
      const fs::path p = in_dir / run_file_name(cfg, g, k);
      std::ifstream in(p);
      if (!in) {
        r.error = "missing " + p.string();
      } else {
        r.series = read_csv(in);
        if (r.series.empty()) r.error = "no records in " + p.string();
      }
      result.runs.push_back(std::move(r));
    }
  }

  json summary = analyse(cfg, result, dir);
  summary["command"] = "collapse";
  summary["config_hash"] = config_hash(cfg);
  summary["status"] = result.complete() ? "ok" : "partial";
  write_summary(dir / (cfg.output.prefix + "_collapse.json"), summary);
  return result.complete() ? kExitOk : kExitPartial;
}

int cmd_lyapunov(const CommonOptions& opts) {
  const RunConfig cfg = resolve(opts);
  const fs::path dir = prepare_dir(cfg);
  const GaussianInit init = cfg.initial_state.resolve(cfg.evolution.hbar);
  const auto& ly = cfg.lyapunov;

  const EnsembleLyapunov ens = ensemble_lyapunov(cfg.hamiltonian, init, ly.ensemble, ly.options,
                                                 ly.seed, cfg.resolved_workers());

  const fs::path csv_path = dir / (cfg.output.prefix + "_lyapunov.csv");
  auto out = open_out(csv_path);
  out << provenance_header(cfg, "lyapunov");
  out << "member,x0,p0,t,lambda\n";
  json members = json::array();
  for (std::size_t k = 0; k < ens.members.size(); ++k) {
    const auto& m = ens.members[k];
    for (const auto& [t, lam] : m.finite_time_series) {
      out << k << ',' << format_double(m.ic.x) << ',' << format_double(m.ic.p) << ','
          << format_double(t) << ',' << format_double(lam) << '\n';
    }
    members.push_back({{"x0", m.ic.x},
                       {"p0", m.ic.p},
                       {"lambda_max", m.lambda_max},
                       {"last_quarter_mean", m.last_quarter_mean},
                       {"last_quarter_std", m.last_quarter_std}});
  }

  json summary = {{"command", "lyapunov"},
                  {"status", "ok"},
                  {"config_hash", config_hash(cfg)},
                  {"lambda_max", ens.mean},
                  {"stddev", ens.stddev},
                  {"members", members},
                  {"outputs", {csv_path.string()}}};
  write_summary(dir / (cfg.output.prefix + "_lyapunov.json"), summary);
  return kExitOk;
}

int cmd_oracle_check(const CommonOptions& opts) {
  const RunConfig cfg = resolve(opts);
  const fs::path dir = prepare_dir(cfg);
  const auto& oc = cfg.oracle;
  const LinearDynamics dyn = LinearDynamics::from_duffing(oc.hamiltonian);
  const GaussianInit init = cfg.initial_state.resolve(oc.hbar);
  init.validate(oc.hbar);
  auto grid = make_grid(cfg.grid);

  const fs::path csv_path = dir / (cfg.output.prefix + "_oracle.csv");
  auto out = open_out(csv_path);
  out << provenance_header(cfg, "oracle-check");
  out << "D,t,purity,oracle_purity,relative_error\n";

  json checks = json::array();
  bool pass = true;
  for (double D : oc.D_values) {
    EvolutionParams evo;
    evo.hbar = oc.hbar;
    evo.D = D;
    evo.dt = oc.dt;
    evo.t_final = oc.t_final;
    evo.record_every = oc.record_every;
    const auto series = evolve(gaussian_wigner(init, oc.hbar, grid), evo, oc.hamiltonian).series;
    std::vector<double> times;
    for (const auto& r : series) times.push_back(r.t);
    const auto moments = propagate_moments(dyn, D, GaussianMoments::from_init(init), 0.0, times);
    double worst = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      const double ref = gaussian_purity(moments[i], oc.hbar);
      const double err = std::abs(series[i].purity - ref) / ref;
      worst = std::max(worst, err);
      out << format_double(D) << ',' << format_double(series[i].t) << ','
          << format_double(series[i].purity) << ',' << format_double(ref) << ','
          << format_double(err) << '\n';
    }
    const bool ok = worst <= oc.tolerance;
    pass = pass && ok;
    checks.push_back({{"D", D}, {"max_relative_error", worst}, {"pass", ok}});
  }

  json summary = {{"command", "oracle-check"},
                  {"status", pass ? "ok" : "failed"},
                  {"config_hash", config_hash(cfg)},
                  {"tolerance", oc.tolerance},
                  {"checks", checks},
                  {"outputs", {csv_path.string()}}};
  write_summary(dir / (cfg.output.prefix + "_oracle.json"), summary);
  return pass ? kExitOk : kExitNumerical;
}

}  // namespace wigner::cli
