#include "wigner/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <algorithm>
#include <string>

#include "wigner/errors.hpp"

namespace wigner {

namespace detail {
void* aligned_alloc_bytes(std::size_t bytes) { return fftw_malloc(bytes == 0 ? 1 : bytes); }
void aligned_free(void* p) noexcept { fftw_free(p); }
}  // namespace detail

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<double> wavenumbers(std::size_t n, double length) {
  std::vector<double> k(n);
  const double base = 2.0 * std::numbers::pi / length;
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    auto m = static_cast<std::ptrdiff_t>(i);
    if (m >= half) m -= static_cast<std::ptrdiff_t>(n);
    k[i] = base * static_cast<double>(m);
  }
  return k;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

// Per-thread transpose buffer; Grid itself stays immutable and shareable.
RealBuffer& transpose_scratch(std::size_t n) {
  thread_local RealBuffer buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

}  // namespace

void GridSpec::validate() const {
  if (!is_power_of_two(nx) || nx < 32) {
    throw ConfigError("grid.nx", "must be a power of two >= 32, got " + std::to_string(nx));
  }
  if (!is_power_of_two(np) || np < 32) {
    throw ConfigError("grid.np", "must be a power of two >= 32, got " + std::to_string(np));
  }
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw ConfigError("grid.x_max", "x_max must exceed x_min");
  }
  if (!std::isfinite(p_min) || !std::isfinite(p_max) || !(p_max > p_min)) {
    throw ConfigError("grid.p_max", "p_max must exceed p_min");
  }
}

struct Grid::Plans {
  fftw_plan p_forward = nullptr;
  fftw_plan p_inverse = nullptr;
  fftw_plan x_forward = nullptr;
  fftw_plan x_inverse = nullptr;
  fftw_plan to_p_major = nullptr;
  fftw_plan to_x_major = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    for (auto* plan : {p_forward, p_inverse, x_forward, x_inverse, to_p_major, to_x_major}) {
      if (plan != nullptr) fftw_destroy_plan(plan);
    }
  }
};

Grid::Grid(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  dx_ = spec_.dx();
  dp_ = spec_.dp();
  tables_.kx = wavenumbers(spec_.nx, spec_.length_x());
  tables_.lam = wavenumbers(spec_.np, spec_.length_p());

  const int nx = static_cast<int>(spec_.nx);
  const int np = static_cast<int>(spec_.np);
  const int hnp = static_cast<int>(half_np());

  RealBuffer real(size());
  ComplexBuffer cplx(std::max(p_spectrum_size(), x_spectrum_size()));

  plans_ = std::make_unique<Plans>();
  std::lock_guard lock(planner_mutex());
  // FFTW_ESTIMATE keeps the chosen algorithm, and therefore every rounding,
  // identical from run to run.
  const unsigned flags = FFTW_ESTIMATE;
  plans_->p_forward = fftw_plan_many_dft_r2c(1, &np, nx, real.data(), nullptr, 1, np,
                                             as_fftw(cplx.data()), nullptr, 1, hnp, flags);
  plans_->p_inverse = fftw_plan_many_dft_c2r(1, &np, nx, as_fftw(cplx.data()), nullptr, 1, hnp,
                                             real.data(), nullptr, 1, np, flags);
  // x transforms run on a transposed copy so that every batch is contiguous.
  const int hnx = static_cast<int>(half_nx());
  plans_->x_forward = fftw_plan_many_dft_r2c(1, &nx, np, real.data(), nullptr, 1, nx,
                                             as_fftw(cplx.data()), nullptr, 1, hnx, flags);
  plans_->x_inverse = fftw_plan_many_dft_c2r(1, &nx, np, as_fftw(cplx.data()), nullptr, 1, hnx,
                                             real.data(), nullptr, 1, nx, flags);
  // Rank-0 guru plans are pure transposes.
  RealBuffer other(size());
  const fftw_iodim to_p[2] = {{nx, np, 1}, {np, 1, nx}};
  const fftw_iodim to_x[2] = {{np, nx, 1}, {nx, 1, np}};
  plans_->to_p_major =
      fftw_plan_guru_r2r(0, nullptr, 2, to_p, real.data(), other.data(), nullptr, flags);
  plans_->to_x_major =
      fftw_plan_guru_r2r(0, nullptr, 2, to_x, real.data(), other.data(), nullptr, flags);
  if (!plans_->p_forward || !plans_->p_inverse || !plans_->x_forward || !plans_->x_inverse ||
      !plans_->to_p_major || !plans_->to_x_major) {
    throw ConfigError("grid", "failed to create FFT plans");
  }
}

Grid::~Grid() = default;

void Grid::forward_p(std::span<const double> field, std::span<Complex> spectrum) const {
  fftw_execute_dft_r2c(plans_->p_forward, const_cast<double*>(field.data()),
                       as_fftw(spectrum.data()));
}

void Grid::inverse_p(std::span<Complex> spectrum, std::span<double> field) const {
  fftw_execute_dft_c2r(plans_->p_inverse, as_fftw(spectrum.data()), field.data());
}

void Grid::forward_x(std::span<const double> field, std::span<Complex> spectrum) const {
  RealBuffer& work = transpose_scratch(size());
  fftw_execute_r2r(plans_->to_p_major, const_cast<double*>(field.data()), work.data());
  fftw_execute_dft_r2c(plans_->x_forward, work.data(), as_fftw(spectrum.data()));
}

void Grid::inverse_x(std::span<Complex> spectrum, std::span<double> field) const {
  RealBuffer& work = transpose_scratch(size());
  fftw_execute_dft_c2r(plans_->x_inverse, as_fftw(spectrum.data()), work.data());
  fftw_execute_r2r(plans_->to_x_major, work.data(), field.data());
}

GridPtr make_grid(const GridSpec& spec) { return std::make_shared<const Grid>(spec); }

double integrate(const WignerField& field) {
  double sum = 0.0;
  for (double v : field.values) sum += v;
  return sum * field.grid->cell_area();
}

double l2_norm_sq(const WignerField& field) {
  double sum = 0.0;
  for (double v : field.values) sum += v * v;
  return sum * field.grid->cell_area();
}

double l2_distance(const WignerField& a, const WignerField& b) {
  if (a.grid->spec().nx != b.grid->spec().nx || a.grid->spec().np != b.grid->spec().np) {
    throw DataError("l2_distance: fields live on different grids");
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < a.values.size(); ++n) {
    const double d = a.values[n] - b.values[n];
    sum += d * d;
  }
  return std::sqrt(sum * a.grid->cell_area());
}

double tail_mass(const WignerField& field, double band_fraction) {
  const Grid& g = *field.grid;
  const auto bx = static_cast<std::size_t>(std::ceil(band_fraction * static_cast<double>(g.nx())));
  const auto bp = static_cast<std::size_t>(std::ceil(band_fraction * static_cast<double>(g.np())));
  double sum = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const bool edge_x = i < bx || i >= g.nx() - bx;
    for (std::size_t j = 0; j < g.np(); ++j) {
      const bool edge_p = j < bp || j >= g.np() - bp;
      if (edge_x || edge_p) sum += std::abs(field.at(i, j));
    }
  }
  return sum * g.cell_area();
}

}  // namespace wigner
