#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "wigner/diagnostics.hpp"
#include "wigner/grid.hpp"
#include "wigner/potentials.hpp"

namespace wigner {

/// 2/3-rule mask on the lambda axis. `automatic` switches it on when the
/// cubic kernel phase per step exceeds pi anywhere on the grid.
enum class Dealias { off, on, automatic };

struct EvolutionParams {
  double hbar = 0.1;
  double D = 5e-4;
  double dt = 1e-3;
  double t_final = 0.0;
  Dynamics mode = Dynamics::quantum;
  std::size_t record_every = 32;
  Dealias dealias = Dealias::off;

  void validate() const;

  /// Number of steps needed to reach t_final (t_final / dt rounded).
  std::size_t step_count() const;
};

/// Strang-split propagator for
///   d rho/dt = -(p/m) d_x rho + [potential Moyal bracket] + D d_p^2 rho.
///
/// One step is: half kinetic shear in the (k_x, p) representation, full
/// potential + diffusion stage in the (x, lambda) representation with the
/// drive evaluated at the step midpoint, half kinetic shear. Each stage is a
/// pointwise multiplication by a unit-modulus phase (times the diffusion decay
/// exp(-D lambda^2 dt)), so mass is conserved exactly and, for D = 0, the
/// discrete L2 norm is conserved to rounding. Nyquist bins carry no phase so
/// that the field stays real.
///
/// Owns its scratch buffers: one Propagator per evolution.
class Propagator {
 public:
  Propagator(GridPtr grid, const DuffingParams& params, const EvolutionParams& evo);

  /// Advances the field from t to t + dt.
  void step(WignerField& field, double t);

  /// Advances `steps` steps starting at t. Adjacent kinetic half-steps are
  /// merged, which saves a third of the transforms over repeated step().
  /// Checks for blowup every 64 steps; throws NumericalError with the index
  /// of the failing step relative to `first_step`.
  void advance(WignerField& field, double t, std::size_t steps, std::size_t first_step = 0);

  bool dealiasing_active() const noexcept { return dealias_active_; }
  const EvolutionParams& evolution() const noexcept { return evo_; }
  const DuffingParams& hamiltonian() const noexcept { return params_; }

 private:
  void kinetic(RealBuffer& values, const ComplexBuffer& factors);
  void potential_stage(RealBuffer& values, double t_mid);
  void check_health(const WignerField& field, std::size_t step, double t);

  GridPtr grid_;
  DuffingParams params_;
  EvolutionParams evo_;
  bool dealias_active_ = false;
  ComplexBuffer kinetic_half_;
  ComplexBuffer kinetic_full_;
  ComplexBuffer potential_static_;
  std::vector<double> drive_lam_;
  std::vector<Complex> drive_;
  ComplexBuffer scratch_x_;
  ComplexBuffer scratch_p_;
  double reference_mass_ = 0.0;
  double reference_peak_ = 0.0;
};

struct EvolveHooks {
  /// Called once per record, lagging by one record so that s2_rate is final.
  std::function<void(const DiagnosticsRecord&)> on_record;
  /// Called with the field at every recorded step.
  std::function<void(const WignerField&, double t, std::size_t step)> on_snapshot;
};

struct EvolveResult {
  std::vector<DiagnosticsRecord> series;
  WignerField final_field;
};

/// Runs from t = 0 to t_final, recording every `record_every` steps and at
/// the final step. Deterministic for fixed inputs.
EvolveResult evolve(WignerField init, const EvolutionParams& evo, const DuffingParams& params,
                    const EvolveHooks& hooks = {});

/// Checkpoint layout (little-endian):
///   bytes  0..7   magic "WIGNERF1"
///   bytes  8..23  nx, np as uint64
///   bytes 24..55  x_min, x_max, p_min, p_max as float64
///   bytes 56..63  time as float64
///   then nx*np float64 values, row-major with p fastest.
void write_checkpoint(const std::string& path, const WignerField& field, double t);

struct Checkpoint {
  WignerField field;
  double t = 0.0;
};
Checkpoint read_checkpoint(const std::string& path);

}  // namespace wigner
