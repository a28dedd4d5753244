#include "wigner/config.hpp"

#include <cstdio>
#include <fstream>
#include <algorithm>
#include <set>
#include <thread>
#include <sstream>
#include <type_traits>

#include "json.hpp"
#include "wigner/errors.hpp"

#ifndef WIGNER_VERSION
#define WIGNER_VERSION "0.0.0"
#endif

namespace wigner {

using nlohmann::json;

namespace {

constexpr double kDefaultStepsPerPeriod = 2048.0;
constexpr double kDefaultPeriods = 20.0;

// Reads keys out of one JSON object, type-checking each and rejecting any
// key that was never asked for.
class Section {
 public:
  Section(const json& j, std::string path) : path_(std::move(path)) {
    if (j.is_null()) return;
    if (!j.is_object()) throw ConfigError(path_, "must be an object");
    obj_ = &j;
  }

  template <typename T>
  void get(const char* key, T& out) {
    const json* v = find(key);
    if (v == nullptr || v->is_null()) return;
    out = convert<T>(*v, key);
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    if (v->is_null()) {
      out.reset();
      return;
    }
    out = convert<T>(*v, key);
  }

  const json& child(const char* key) {
    static const json null_value;
    const json* v = find(key);
    return v == nullptr ? null_value : *v;
  }

  bool has(const char* key) const { return obj_ != nullptr && obj_->contains(key); }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    if (obj_ == nullptr) return;
    for (const auto& [k, v] : obj_->items()) {
      if (!seen_.count(k)) throw ConfigError(field(k.c_str()), "unknown key");
    }
  }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    if (obj_ == nullptr) return nullptr;
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }

  template <typename T>
  T convert(const json& v, const char* key) const {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError(field(key), "must be a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(field(key), "must be a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() && !v.is_number_unsigned()) {
          throw ConfigError(field(key), "must be an integer");
        }
        if (v.is_number_integer() && v.get<long long>() < 0) {
          throw ConfigError(field(key), "must be non-negative");
        }
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(field(key), "must be a string");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), e.what());
    }
  }

  const json* obj_ = nullptr;
  std::string path_;
  std::set<std::string> seen_;
};

Dynamics parse_mode(const std::string& s) {
  if (s == "quantum") return Dynamics::quantum;
  if (s == "classical") return Dynamics::classical;
  throw ConfigError("evolution.mode", "expected \"quantum\" or \"classical\", got \"" + s + "\"");
}

const char* mode_name(Dynamics d) { return d == Dynamics::quantum ? "quantum" : "classical"; }

Dealias parse_dealias(const std::string& s) {
  if (s == "off") return Dealias::off;
  if (s == "on") return Dealias::on;
  if (s == "auto") return Dealias::automatic;
  throw ConfigError("evolution.dealias", "expected \"off\", \"on\" or \"auto\", got \"" + s + "\"");
}

const char* dealias_name(Dealias d) {
  switch (d) {
    case Dealias::off: return "off";
    case Dealias::on: return "on";
    case Dealias::automatic: return "auto";
  }
  return "off";
}

void read_hamiltonian(const json& j, const std::string& path, DuffingParams& h) {
  Section s(j, path);
  s.get("m", h.m);
  s.get("B", h.B);
  s.get("C", h.C);
  s.get("A", h.A);
  s.get("omega", h.omega);
  s.finish();
}

json hamiltonian_json(const DuffingParams& h) {
  return {{"m", h.m}, {"B", h.B}, {"C", h.C}, {"A", h.A}, {"omega", h.omega}};
}

std::vector<ScalingGroup> read_groups(const json& j, const RegimeThresholds& thresholds) {
  if (!j.is_array()) throw ConfigError("sweep.groups", "must be an array");
  std::vector<ScalingGroup> groups;
  for (std::size_t g = 0; g < j.size(); ++g) {
    const std::string path = "sweep.groups[" + std::to_string(g) + "]";
    Section s(j[g], path);
    ScalingGroup group;
    s.get("zeta0", group.zeta0);
    const json& members = s.child("members");
    s.finish();
    if (!members.is_array() || members.empty()) {
      throw ConfigError(path + ".members", "must be a non-empty array of [hbar, D]");
    }
    for (const auto& m : members) {
      if (!m.is_array() || m.size() != 2 || !m[0].is_number() || !m[1].is_number()) {
        throw ConfigError(path + ".members", "each member must be [hbar, D]");
      }
      group.members.push_back({m[0].get<double>(), m[1].get<double>()});
    }
    group.label = classify_regime(group.zeta0, thresholds);
    groups.push_back(std::move(group));
  }
  return groups;
}

void set_path(json& root, const std::string& dotted, json value) {
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    if (key.empty()) throw ConfigError(dotted, "empty path component in override");
    if (node->is_null()) *node = json::object();
    if (!node->is_object()) throw ConfigError(dotted, "override path crosses a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

void apply_override(json& root, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(spec, "override must look like key.path=value");
  }
  const std::string key = spec.substr(0, eq);
  const std::string text = spec.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  // An override of one duration form replaces the other.
  if (root.contains("evolution") && root["evolution"].is_object()) {
    if (key == "evolution.t_final") root["evolution"].erase("t_final_periods");
    if (key == "evolution.t_final_periods") root["evolution"].erase("t_final");
  }
  set_path(root, key, std::move(value));
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig from_json(const json& root) {
  RunConfig c = default_config();
  Section top(root, "");

  read_hamiltonian(top.child("hamiltonian"), "hamiltonian", c.hamiltonian);
  const double period = c.hamiltonian.drive_period();

  {
    Section s(top.child("grid"), "grid");
    s.get("nx", c.grid.nx);
    s.get("np", c.grid.np);
    s.get("x_min", c.grid.x_min);
    s.get("x_max", c.grid.x_max);
    s.get("p_min", c.grid.p_min);
    s.get("p_max", c.grid.p_max);
    s.finish();
  }
  {
    Section s(top.child("initial_state"), "initial_state");
    s.get("x0", c.initial_state.x0);
    s.get("p0", c.initial_state.p0);
    s.get("var_x", c.initial_state.var_x);
    s.get("var_p", c.initial_state.var_p);
    s.finish();
  }
  {
    Section s(top.child("evolution"), "evolution");
    auto& e = c.evolution;
    s.get("hbar", e.hbar);
    s.get("D", e.D);
    std::optional<double> dt;
    std::optional<double> t_final;
    std::optional<double> t_final_periods;
    s.get("dt", dt);
    s.get("t_final", t_final);
    s.get("t_final_periods", t_final_periods);
    if (t_final && t_final_periods) {
      throw ConfigError("evolution.t_final", "give t_final or t_final_periods, not both");
    }
    if (period <= 0.0 && (!dt || (!t_final && !t_final_periods) || t_final_periods)) {
      throw ConfigError("evolution.dt", "an undriven Hamiltonian needs explicit dt and t_final");
    }
    e.dt = dt ? *dt : period / kDefaultStepsPerPeriod;
    e.t_final = t_final ? *t_final : (t_final_periods ? *t_final_periods : kDefaultPeriods) * period;
    std::string mode = mode_name(e.mode);
    s.get("mode", mode);
    e.mode = parse_mode(mode);
    s.get("record_every", e.record_every);
    std::string dealias = dealias_name(e.dealias);
    s.get("dealias", dealias);
    e.dealias = parse_dealias(dealias);
    s.finish();
  }
  {
    Section s(top.child("output"), "output");
    s.get("dir", c.output.dir);
    s.get("prefix", c.output.prefix);
    s.get("csv", c.output.csv);
    s.get("jsonl", c.output.jsonl);
    s.get("checkpoint_every", c.output.checkpoint_every);
    s.get("final_checkpoint", c.output.final_checkpoint);
    s.finish();
  }
  {
    Section s(top.child("sweep"), "sweep");
    auto& w = c.sweep;
    s.get("zeta_c", w.thresholds.zeta_c);
    s.get("zeta_q", w.thresholds.zeta_q);
    const json& groups = s.child("groups");
    if (!groups.is_null()) {
      w.groups = read_groups(groups, w.thresholds);
    } else {
      w.groups = figure2_groups(w.thresholds);
    }
    s.get("strict_zeta0", w.strict_zeta0);
    s.get("scaling_window_periods", w.scaling_window_periods);
    s.get("early_window_lo_periods", w.early_window_lo_periods);
    s.get("early_window_hi_periods", w.early_window_hi_periods);
    s.get("late_window_lo_periods", w.late_window_lo_periods);
    s.get("late_window_hi_periods", w.late_window_hi_periods);
    s.get("comparison_time_periods", w.comparison_time_periods);
    s.get("collapse_threshold", w.collapse_threshold);
    s.get("plateau_search_lo", w.plateau_search_lo);
    s.get("plateau_search_hi", w.plateau_search_hi);
    s.get("plateau_min_periods", w.plateau_min_periods);
    s.finish();
  }
  {
    Section s(top.child("lyapunov"), "lyapunov");
    auto& l = c.lyapunov;
    s.get("t_total", l.options.t_total);
    s.get("renorm_interval", l.options.renorm_interval);
    s.get("dt", l.options.dt);
    s.get("t0", l.options.t0);
    s.get("ensemble", l.ensemble);
    s.get("seed", l.seed);
    s.finish();
  }
  {
    Section s(top.child("oracle"), "oracle");
    auto& o = c.oracle;
    read_hamiltonian(s.child("hamiltonian"), "oracle.hamiltonian", o.hamiltonian);
    s.get("hbar", o.hbar);
    s.get("D_values", o.D_values);
    s.get("t_final", o.t_final);
    s.get("dt", o.dt);
    s.get("record_every", o.record_every);
    s.get("tolerance", o.tolerance);
    s.finish();
  }
  top.get("workers", c.workers);
  top.finish();
  return c;
}

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace

GaussianInit InitialStateConfig::resolve(double hbar) const {
  if (var_p) return GaussianInit{x0, p0, var_x, *var_p};
  return GaussianInit::minimum_uncertainty(x0, p0, var_x, hbar);
}

void RunConfig::validate() const {
  hamiltonian.validate();
  grid.validate();
  evolution.validate();
  initial_state.resolve(evolution.hbar).validate(evolution.hbar);
  require(!output.dir.empty(), "output.dir", "must not be empty");
  require(!output.prefix.empty(), "output.prefix", "must not be empty");

  require(sweep.thresholds.zeta_c > 0.0 && sweep.thresholds.zeta_q > sweep.thresholds.zeta_c,
          "sweep.zeta_q", "must exceed zeta_c > 0");
  for (const auto& g : sweep.groups) g.validate(sweep.strict_zeta0);
  require(sweep.scaling_window_periods > 0.0, "sweep.scaling_window_periods", "must be positive");
  require(sweep.early_window_hi_periods > sweep.early_window_lo_periods,
          "sweep.early_window_hi_periods", "must exceed early_window_lo_periods");
  require(sweep.late_window_hi_periods > sweep.late_window_lo_periods,
          "sweep.late_window_hi_periods", "must exceed late_window_lo_periods");
  require(sweep.comparison_time_periods > 0.0, "sweep.comparison_time_periods", "must be positive");
  require(sweep.collapse_threshold > 0.0, "sweep.collapse_threshold", "must be positive");
  require(sweep.plateau_search_hi > sweep.plateau_search_lo, "sweep.plateau_search_hi",
          "must exceed plateau_search_lo");
  require(sweep.plateau_min_periods > 0.0, "sweep.plateau_min_periods", "must be positive");

  require(lyapunov.options.t_total > 0.0, "lyapunov.t_total", "must be positive");
  require(lyapunov.options.renorm_interval > 0.0, "lyapunov.renorm_interval", "must be positive");
  require(lyapunov.options.dt >= 0.0, "lyapunov.dt", "must be >= 0");
  require(lyapunov.ensemble >= 1, "lyapunov.ensemble", "must be at least 1");

  oracle.hamiltonian.validate();
  require(oracle.hamiltonian.C == 0.0, "oracle.hamiltonian.C", "the Gaussian oracle needs C = 0");
  require(oracle.hbar > 0.0, "oracle.hbar", "must be positive");
  require(!oracle.D_values.empty(), "oracle.D_values", "must not be empty");
  for (double d : oracle.D_values) require(d >= 0.0, "oracle.D_values", "must be >= 0");
  require(oracle.t_final > 0.0, "oracle.t_final", "must be positive");
  require(oracle.dt > 0.0, "oracle.dt", "must be positive");
  require(oracle.record_every > 0, "oracle.record_every", "must be positive");
  require(oracle.tolerance > 0.0, "oracle.tolerance", "must be positive");
}

std::size_t RunConfig::resolved_workers() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepConfig RunConfig::sweep_config() const {
  SweepConfig s;
  s.hamiltonian = hamiltonian;
  s.grid = grid;
  s.initial = initial_state.resolve(evolution.hbar);
  s.fixed_var_p = initial_state.var_p.has_value();
  s.evolution = evolution;
  s.groups = sweep.groups;
  s.strict_zeta0 = sweep.strict_zeta0;
  s.workers = resolved_workers();
  return s;
}

RunConfig default_config() {
  RunConfig c;
  const double period = c.hamiltonian.drive_period();
  c.evolution.dt = period / kDefaultStepsPerPeriod;
  c.evolution.t_final = kDefaultPeriods * period;
  return c;
}

RunConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides) {
  json root = json::object();
  if (!json_text.empty()) {
    root = json::parse(json_text, nullptr, false, true);
    if (root.is_discarded()) throw ConfigError("config", "not valid JSON");
    if (!root.is_object()) throw ConfigError("config", "top level must be an object");
  }
  for (const auto& o : overrides) apply_override(root, o);
  RunConfig c = from_json(root);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

std::string to_json(const RunConfig& c) {
  json groups = json::array();
  for (const auto& g : c.sweep.groups) {
    json members = json::array();
    for (const auto& m : g.members) members.push_back({m.hbar, m.D});
    groups.push_back({{"zeta0", g.zeta0}, {"members", members}});
  }
  json j;
  j["hamiltonian"] = hamiltonian_json(c.hamiltonian);
  j["grid"] = {{"nx", c.grid.nx}, {"np", c.grid.np}, {"x_min", c.grid.x_min},
               {"x_max", c.grid.x_max}, {"p_min", c.grid.p_min}, {"p_max", c.grid.p_max}};
  j["initial_state"] = {{"x0", c.initial_state.x0},
                        {"p0", c.initial_state.p0},
                        {"var_x", c.initial_state.var_x},
                        {"var_p", c.initial_state.var_p ? json(*c.initial_state.var_p) : json()}};
  j["evolution"] = {{"hbar", c.evolution.hbar},
                    {"D", c.evolution.D},
                    {"dt", c.evolution.dt},
                    {"t_final", c.evolution.t_final},
                    {"mode", mode_name(c.evolution.mode)},
                    {"record_every", c.evolution.record_every},
                    {"dealias", dealias_name(c.evolution.dealias)}};
  j["output"] = {{"dir", c.output.dir},
                 {"prefix", c.output.prefix},
                 {"csv", c.output.csv},
                 {"jsonl", c.output.jsonl},
                 {"checkpoint_every", c.output.checkpoint_every},
                 {"final_checkpoint", c.output.final_checkpoint}};
  j["sweep"] = {{"zeta_c", c.sweep.thresholds.zeta_c},
                {"zeta_q", c.sweep.thresholds.zeta_q},
                {"groups", groups},
                {"strict_zeta0", c.sweep.strict_zeta0},
                {"scaling_window_periods", c.sweep.scaling_window_periods},
                {"early_window_lo_periods", c.sweep.early_window_lo_periods},
                {"early_window_hi_periods", c.sweep.early_window_hi_periods},
                {"late_window_lo_periods", c.sweep.late_window_lo_periods},
                {"late_window_hi_periods", c.sweep.late_window_hi_periods},
                {"comparison_time_periods", c.sweep.comparison_time_periods},
                {"collapse_threshold", c.sweep.collapse_threshold},
                {"plateau_search_lo", c.sweep.plateau_search_lo},
                {"plateau_search_hi", c.sweep.plateau_search_hi},
                {"plateau_min_periods", c.sweep.plateau_min_periods}};
  j["lyapunov"] = {{"t_total", c.lyapunov.options.t_total},
                   {"renorm_interval", c.lyapunov.options.renorm_interval},
                   {"dt", c.lyapunov.options.dt},
                   {"t0", c.lyapunov.options.t0},
                   {"ensemble", c.lyapunov.ensemble},
                   {"seed", c.lyapunov.seed}};
  j["oracle"] = {{"hamiltonian", hamiltonian_json(c.oracle.hamiltonian)},
                 {"hbar", c.oracle.hbar},
                 {"D_values", c.oracle.D_values},
                 {"t_final", c.oracle.t_final},
                 {"dt", c.oracle.dt},
                 {"record_every", c.oracle.record_every},
                 {"tolerance", c.oracle.tolerance}};
  j["workers"] = c.workers;
  return j.dump();
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json(config))));
  return buf;
}

std::string provenance_header(const RunConfig& config, const std::string& command) {
  std::string out;
  out += "# wigner-entropy " WIGNER_VERSION " " + command + "\n";
  out += "# config: " + to_json(config) + "\n";
  out += "# config_hash: " + config_hash(config) + "\n";
  return out;
}

}  // namespace wigner
