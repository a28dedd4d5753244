#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wigner/diagnostics.hpp"
#include "wigner/grid.hpp"
#include "wigner/potentials.hpp"
#include "wigner/propagator.hpp"
#include "wigner/states.hpp"

namespace wigner {

using Series = std::vector<DiagnosticsRecord>;

enum class Regime { classical, semi_classical, quantum };

struct RegimeThresholds {
  double zeta_c = 10.0;   ///< upper limit of the rapidly decohering regime
  double zeta_q = 100.0;  ///< onset of the quantum regime
};

/// I below zeta_c, III at or above zeta_q, II in between.
Regime classify_regime(double zeta0, const RegimeThresholds& thresholds = {});
std::string_view regime_label(Regime r);

struct HbarD {
  double hbar = 0.0;
  double D = 0.0;
  double zeta0() const { return hbar * hbar / D; }
};

struct ScalingGroup {
  double zeta0 = 0.0;
  std::vector<HbarD> members;
  Regime label = Regime::classical;

  /// Members need positive hbar and D. With `strict`, every member must also
  /// satisfy hbar^2 / D == zeta0 to 1e-9 relative.
  void validate(bool strict = true) const;

  /// Members whose hbar^2 / D differs from zeta0 by more than 1e-9 relative.
  std::vector<HbarD> off_scale_members() const;
};

/// The three groups of the normalized-purity figure: zeta0 = 2, 40, 100,
/// with the reference pairs. The first pair of the zeta0 = 2 group,
/// (0.1, 5e-4), has hbar^2 / D = 20.
std::vector<ScalingGroup> figure2_groups(const RegimeThresholds& thresholds = {});

struct TimeWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct SweepConfig {
  DuffingParams hamiltonian;
  GridSpec grid;
  /// Centre and position variance; var_p follows from hbar per run unless
  /// fixed_var_p is set.
  GaussianInit initial;
  bool fixed_var_p = false;
  /// hbar and D are replaced per member.
  EvolutionParams evolution;
  std::vector<ScalingGroup> groups;
  /// Reject members whose hbar^2 / D does not match their group.
  bool strict_zeta0 = false;
  std::size_t workers = 1;
};

struct RunOutcome {
  std::size_t group = 0;
  HbarD pair;
  Series series;
  std::optional<std::string> error;
};

struct SweepResult {
  std::vector<RunOutcome> runs;
  GridSpec grid;
  double dt = 0.0;
  std::vector<ScalingGroup> groups;

  bool complete() const;
  /// Series of every successful run in the given group.
  std::vector<const Series*> group_series(std::size_t group) const;
};

/// Runs every (hbar, D) of every group on a bounded worker pool. Failed runs
/// carry an error marker instead of aborting the sweep. `on_done` is called
/// under a lock as runs finish.
SweepResult run_sweep(const SweepConfig& config,
                      const std::function<void(const RunOutcome&)>& on_done = {});

/// S(t) = S2(t) - S2(0).
std::vector<double> relative_entropy(const Series& s);

/// max over samples with t in the window of |S_a(t) - S_b(t)|. Throws
/// DataError when the sample times differ.
double pair_distance(const Series& a, const Series& b, TimeWindow window);

/// Largest pair_distance among members. Needs at least two runs.
double collapse_metric(std::span<const Series* const> group, TimeWindow window);

/// Smallest pair_distance between a member of `a` and a member of `b`.
double cross_group_separation(std::span<const Series* const> a,
                              std::span<const Series* const> b, TimeWindow window);

/// purity(t) / purity(0), linearly interpolated between samples.
double normalized_purity_at(const Series& s, double t);
double group_median_normalized_purity(std::span<const Series* const> group, double t);

struct MetastableFit {
  double chi2_star = 0.0;
  double lambda_fit = 0.0;       ///< 2 D chi2_star
  double entropy_rate = 0.0;     ///< mean of -dS2/dt over the window
  double relative_slope = 0.0;   ///< regression slope of chi2_p / mean, per unit time
  TimeWindow window;
};

struct PlateauOptions {
  double max_relative_slope = 0.1;  ///< per unit time
  double min_length = 0.0;          ///< time; callers pass two drive periods
};

/// Longest window inside `search` whose chi2_p plateaus: every sub-window of
/// min_length, and the whole window, has |regression slope| / mean below
/// max_relative_slope. Returns nullopt when no window of min_length exists.
std::optional<MetastableFit> fit_metastable(const Series& s, TimeWindow search, double D,
                                            const PlateauOptions& opts);

struct FirstOrderFit {
  double lambda = 0.0;  ///< intercept of lambda_fit(zeta0)
  double a = 0.0;       ///< from lambda_fit = lambda (1 + a zeta0 / 4)
  std::size_t runs = 0;
};

/// Least-squares fit of lambda_fit against zeta0. Needs two distinct zeta0.
std::optional<FirstOrderFit> fit_first_order(std::span<const std::pair<double, double>> zeta_lambda);

}  // namespace wigner
