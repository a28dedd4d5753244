#include "wigner/propagator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "wigner/errors.hpp"

namespace wigner {

namespace {

constexpr std::size_t kHealthInterval = 64;
constexpr double kMassDriftLimit = 1e-6;
constexpr double kPeakGrowthLimit = 1e3;

// Plain complex product; std::complex operator* goes through the Annex G
// NaN-recovery path, which dominates the pointwise stages.
inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

void EvolutionParams::validate() const {
  if (mode == Dynamics::quantum && !(hbar > 0.0)) {
    throw ConfigError("evolution.hbar", "must be positive in quantum mode");
  }
  if (!std::isfinite(hbar) || hbar < 0.0) throw ConfigError("evolution.hbar", "must be finite");
  if (!(D >= 0.0) || !std::isfinite(D)) throw ConfigError("evolution.D", "must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("evolution.dt", "must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw ConfigError("evolution.t_final", "must be >= 0");
  }
  if (record_every == 0) throw ConfigError("evolution.record_every", "must be >= 1");
}

std::size_t EvolutionParams::step_count() const {
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

Propagator::Propagator(GridPtr grid, const DuffingParams& params, const EvolutionParams& evo)
    : grid_(std::move(grid)), params_(params), evo_(evo) {
  params_.validate();
  evo_.validate();
  const Grid& g = *grid_;
  const std::size_t nx = g.nx();
  const std::size_t np = g.np();
  const std::size_t hx = g.half_nx();
  const std::size_t hp = g.half_np();
  const auto& kx = g.tables().kx;
  const auto& lam = g.tables().lam;
  const double dt = evo_.dt;

  // (k_x, p) stage: exp(-i k_x p tau / m), normalized for the inverse DFT.
  kinetic_half_.resize(g.x_spectrum_size());
  kinetic_full_.resize(g.x_spectrum_size());
  const double inv_nx = 1.0 / static_cast<double>(nx);
  for (std::size_t k = 0; k < hx; ++k) {
    const bool nyquist = 2 * k == nx;
    for (std::size_t j = 0; j < np; ++j) {
      const double rate = nyquist ? 0.0 : -kx[k] * g.p(j) / params_.m;
      kinetic_half_[j * hx + k] = std::polar(inv_nx, rate * 0.5 * dt);
      kinetic_full_[j * hx + k] = std::polar(inv_nx, rate * dt);
    }
  }

  const double lam_nyquist = std::abs(lam[np / 2]);
  double max_abs_x = std::max(std::abs(g.spec().x_min), std::abs(g.spec().x_max));
  const double cubic_phase =
      0.5 * params_.C * evo_.hbar * evo_.hbar * max_abs_x * std::pow(lam_nyquist, 3) * dt;
  dealias_active_ = evo_.dealias == Dealias::on ||
                    (evo_.dealias == Dealias::automatic && evo_.mode == Dynamics::quantum &&
                     cubic_phase > std::numbers::pi);
  const double cutoff = 2.0 / 3.0 * lam_nyquist;

  // (x, lambda) stage without the drive: exp(i dt theta) exp(-D lambda^2 dt).
  // The drive term lambda A cos(omega t) is separable and applied per step.
  potential_static_.resize(g.p_spectrum_size());
  drive_lam_.assign(hp, 0.0);
  const double inv_np = 1.0 / static_cast<double>(np);
  for (std::size_t l = 0; l < hp; ++l) {
    const bool nyquist = 2 * l == np;
    drive_lam_[l] = nyquist ? 0.0 : lam[l];
  }
  DuffingParams undriven = params_;
  undriven.A = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = g.x(i);
    for (std::size_t l = 0; l < hp; ++l) {
      const bool nyquist = 2 * l == np;
      const double theta = nyquist ? 0.0 : kernel(evo_.mode, undriven, evo_.hbar, x, lam[l], 0.0);
      double amplitude = inv_np * std::exp(-evo_.D * lam[l] * lam[l] * dt);
      if (dealias_active_ && std::abs(lam[l]) > cutoff) amplitude = 0.0;
      potential_static_[i * hp + l] = std::polar(amplitude, theta * dt);
    }
  }
  drive_.assign(hp, Complex(1.0, 0.0));
  scratch_x_.resize(g.x_spectrum_size());
  scratch_p_.resize(g.p_spectrum_size());
}

void Propagator::kinetic(RealBuffer& values, const ComplexBuffer& factors) {
  const Grid& g = *grid_;
  g.forward_x(values, scratch_x_);
  const std::size_t n = scratch_x_.size();
  Complex* s = scratch_x_.data();
  const Complex* f = factors.data();
  for (std::size_t q = 0; q < n; ++q) s[q] = mul(s[q], f[q]);
  g.inverse_x(scratch_x_, values);
}

void Propagator::potential_stage(RealBuffer& values, double t_mid) {
  const Grid& g = *grid_;
  const std::size_t hp = g.half_np();
  const double force = params_.A * std::cos(params_.omega * t_mid);
  for (std::size_t l = 0; l < hp; ++l) drive_[l] = std::polar(1.0, drive_lam_[l] * force * evo_.dt);

  g.forward_p(values, scratch_p_);
  for (std::size_t i = 0; i < g.nx(); ++i) {
    Complex* row = scratch_p_.data() + i * hp;
    const Complex* stat = potential_static_.data() + i * hp;
    for (std::size_t l = 0; l < hp; ++l) row[l] = mul(row[l], mul(stat[l], drive_[l]));
  }
  g.inverse_p(scratch_p_, values);
}

void Propagator::step(WignerField& field, double t) {
  kinetic(field.values, kinetic_half_);
  potential_stage(field.values, t + 0.5 * evo_.dt);
  kinetic(field.values, kinetic_half_);
}

void Propagator::check_health(const WignerField& field, std::size_t step, double t) {
  double sum = 0.0;
  double peak = 0.0;
  for (double v : field.values) {
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite field value", step, t);
    }
    sum += v;
    peak = std::max(peak, std::abs(v));
  }
  const double mass = sum * grid_->cell_area();
  if (std::abs(mass - reference_mass_) > kMassDriftLimit * std::max(1.0, std::abs(reference_mass_))) {
    std::ostringstream msg;
    msg << "mass drifted from " << reference_mass_ << " to " << mass;
    throw NumericalError(msg.str(), step, t);
  }
  if (peak > kPeakGrowthLimit * reference_peak_) {
    throw NumericalError("field amplitude grew beyond the blowup threshold", step, t);
  }
}

void Propagator::advance(WignerField& field, double t, std::size_t steps, std::size_t first_step) {
  if (steps == 0) return;
  if (field.values.size() != grid_->size()) {
    throw ConfigError("field", "field does not match the propagator grid");
  }
  reference_mass_ = integrate(field);
  reference_peak_ = 0.0;
  for (double v : field.values) reference_peak_ = std::max(reference_peak_, std::abs(v));

  const double dt = evo_.dt;
  kinetic(field.values, kinetic_half_);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t_start = t + static_cast<double>(s) * dt;
    potential_stage(field.values, t_start + 0.5 * dt);
    kinetic(field.values, s + 1 == steps ? kinetic_half_ : kinetic_full_);
    if ((s + 1) % kHealthInterval == 0 || s + 1 == steps) {
      check_health(field, first_step + s, t_start + dt);
    }
  }
}

EvolveResult evolve(WignerField init, const EvolutionParams& evo, const DuffingParams& params,
                    const EvolveHooks& hooks) {
  Propagator prop(init.grid, params, evo);
  const std::size_t total = evo.step_count();
  EvolveResult result;
  auto& series = result.series;
  WignerField field = std::move(init);

  auto emit = [&](std::size_t done) {
    const double t = static_cast<double>(done) * evo.dt;
    series.push_back(measure(field, t, evo.hbar));
    if (hooks.on_snapshot) hooks.on_snapshot(field, t, done);
    // Rates for the previous record are final once this one exists.
    if (series.size() >= 2) {
      fill_rates(series, evo.D);
      if (hooks.on_record) hooks.on_record(series[series.size() - 2]);
    }
  };

  emit(0);
  std::size_t done = 0;
  while (done < total) {
    const std::size_t chunk = std::min(evo.record_every, total - done);
    try {
      prop.advance(field, static_cast<double>(done) * evo.dt, chunk, done);
    } catch (const NumericalError& e) {
      const std::size_t step = e.step().value_or(done);
      throw NumericalError(std::string(e.what()) + " at step " + std::to_string(step) +
                               " (t=" + format_double(static_cast<double>(step + 1) * evo.dt) + ")",
                           step, static_cast<double>(step + 1) * evo.dt);
    }
    done += chunk;
    emit(done);
  }
  fill_rates(series, evo.D);
  if (hooks.on_record) hooks.on_record(series.back());
  result.final_field = std::move(field);
  return result;
}

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is written in host order and assumes little-endian");

namespace {
constexpr char kMagic[8] = {'W', 'I', 'G', 'N', 'E', 'R', 'F', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw DataError("checkpoint: truncated header");
  return v;
}
}  // namespace

void write_checkpoint(const std::string& path, const WignerField& field, double t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("output", "cannot open checkpoint file " + path);
  const GridSpec& s = field.grid->spec();
  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, s.nx);
  put<std::uint64_t>(out, s.np);
  put(out, s.x_min);
  put(out, s.x_max);
  put(out, s.p_min);
  put(out, s.p_max);
  put(out, t);
  out.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  if (!out) throw ConfigError("output", "failed writing checkpoint " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("checkpoint", "cannot open " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw DataError("checkpoint: bad magic in " + path);
  }
  GridSpec s;
  s.nx = get<std::uint64_t>(in);
  s.np = get<std::uint64_t>(in);
  s.x_min = get<double>(in);
  s.x_max = get<double>(in);
  s.p_min = get<double>(in);
  s.p_max = get<double>(in);
  Checkpoint cp;
  cp.t = get<double>(in);
  cp.field = WignerField(make_grid(s));
  in.read(reinterpret_cast<char*>(cp.field.values.data()),
          static_cast<std::streamsize>(cp.field.values.size() * sizeof(double)));
  if (!in) throw DataError("checkpoint: truncated payload in " + path);
  return cp;
}

}  // namespace wigner
