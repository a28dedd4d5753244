#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wigner/classical_chaos.hpp"
#include "wigner/experiments.hpp"
#include "wigner/grid.hpp"
#include "wigner/potentials.hpp"
#include "wigner/propagator.hpp"
#include "wigner/states.hpp"

namespace wigner {

struct InitialStateConfig {
  double x0 = 1.0;
  double p0 = 0.0;
  double var_x = 0.05;
  /// Unset: minimum-uncertainty state for the run's hbar.
  std::optional<double> var_p;

  GaussianInit resolve(double hbar) const;
};

struct OutputConfig {
  std::string dir = "out";
  std::string prefix = "run";
  bool csv = true;
  bool jsonl = false;
  /// Write a field checkpoint every N records; 0 disables periodic dumps.
  std::size_t checkpoint_every = 0;
  bool final_checkpoint = false;
};

/// Analysis windows are given in drive periods.
struct SweepConfigBlock {
  std::vector<ScalingGroup> groups = figure2_groups();
  double scaling_window_periods = 10.0;
  double early_window_lo_periods = 0.0;
  double early_window_hi_periods = 5.0;
  double late_window_lo_periods = 15.0;
  double late_window_hi_periods = 20.0;
  double comparison_time_periods = 10.0;
  double collapse_threshold = 0.1;
  RegimeThresholds thresholds;
  bool strict_zeta0 = false;
  /// Search range for the metastable plateau, in time units.
  double plateau_search_lo = 5.0;
  double plateau_search_hi = 15.0;
  double plateau_min_periods = 2.0;
};

struct LyapunovConfigBlock {
  LyapunovOptions options{2000.0, 1.0, 0.0, 0.0};
  std::size_t ensemble = 16;
  std::uint64_t seed = 20050101;
};

struct OracleConfigBlock {
  DuffingParams hamiltonian{1.0, -0.5, 0.0, 0.0, 0.0};
  double hbar = 0.1;
  std::vector<double> D_values = {0.0, 1e-3};
  double t_final = 10.0;
  double dt = 1e-3;
  std::size_t record_every = 100;
  double tolerance = 0.005;
};

/// Fully resolved configuration. Every block validates through its module.
struct RunConfig {
  DuffingParams hamiltonian;
  GridSpec grid;
  InitialStateConfig initial_state;
  EvolutionParams evolution;
  OutputConfig output;
  SweepConfigBlock sweep;
  LyapunovConfigBlock lyapunov;
  OracleConfigBlock oracle;
  /// Zero selects the available hardware parallelism.
  std::size_t workers = 0;

  /// Runs the module validators; throws ConfigError naming the field.
  void validate() const;

  std::size_t resolved_workers() const;
  SweepConfig sweep_config() const;
};

/// Defaults: the reference Hamiltonian (m=1, B=10, C=1, A=1, omega=5.35), a
/// 256x256 grid on [-6,6]x[-16,16], the Gaussian at (1, 0) with var_x=0.05,
/// hbar=0.1, D=5e-4, dt = T_drive/2048 and t_final = 20 drive periods.
RunConfig default_config();

/// Parses JSON text (an empty string gives the defaults), applies dotted
/// `key=value` overrides, and validates. Values parse as JSON when possible,
/// otherwise as strings. Unknown keys are rejected.
RunConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Canonical compact JSON of the resolved configuration.
std::string to_json(const RunConfig& config);

/// FNV-1a 64-bit hash of to_json(config), as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// '#'-prefixed provenance lines: tool version, resolved config, hash.
std::string provenance_header(const RunConfig& config, const std::string& command);

}  // namespace wigner
