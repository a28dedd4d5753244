#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "wigner/aligned.hpp"

namespace wigner {

using Complex = std::complex<double>;
using RealBuffer = AlignedVector<double>;
using ComplexBuffer = AlignedVector<Complex>;

/// Discretized periodic phase-space box. Index i runs along x, j along p.
struct GridSpec {
  std::size_t nx = 256;
  std::size_t np = 256;
  double x_min = -6.0;
  double x_max = 6.0;
  double p_min = -16.0;
  double p_max = 16.0;

  double dx() const { return (x_max - x_min) / static_cast<double>(nx); }
  double dp() const { return (p_max - p_min) / static_cast<double>(np); }
  double length_x() const { return x_max - x_min; }
  double length_p() const { return p_max - p_min; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Wavenumbers in standard DFT order: 0, 1, ..., N/2-1, -N/2, ..., -1 times 2pi/L.
/// The entry at N/2 is the Nyquist mode -pi/d.
struct SpectralTables {
  std::vector<double> kx;
  std::vector<double> lam;
};

/// Immutable grid with wavenumber tables and batched real-to-complex
/// transforms along each axis. Transforms run on caller-owned buffers
/// allocated through AlignedVector; sharing a Grid across threads is safe.
///
/// Field storage is row-major with p fastest: value(i, j) = values[i * np + j].
/// Along p the half spectrum is stored as [i][l] with l < np/2 + 1. Along x it
/// is stored as [j][k] with k < nx/2 + 1, i.e. one contiguous half spectrum per
/// momentum row. Inverse transforms are unnormalized.
class Grid {
 public:
  explicit Grid(const GridSpec& spec);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  const GridSpec& spec() const noexcept { return spec_; }
  const SpectralTables& tables() const noexcept { return tables_; }
  std::size_t nx() const noexcept { return spec_.nx; }
  std::size_t np() const noexcept { return spec_.np; }
  std::size_t size() const noexcept { return spec_.nx * spec_.np; }
  double dx() const noexcept { return dx_; }
  double dp() const noexcept { return dp_; }
  double cell_area() const noexcept { return dx_ * dp_; }
  double x(std::size_t i) const noexcept { return spec_.x_min + dx_ * static_cast<double>(i); }
  double p(std::size_t j) const noexcept { return spec_.p_min + dp_ * static_cast<double>(j); }

  std::size_t half_np() const noexcept { return spec_.np / 2 + 1; }
  std::size_t half_nx() const noexcept { return spec_.nx / 2 + 1; }
  std::size_t p_spectrum_size() const noexcept { return spec_.nx * half_np(); }
  std::size_t x_spectrum_size() const noexcept { return half_nx() * spec_.np; }

  void forward_p(std::span<const double> field, std::span<Complex> spectrum) const;
  void inverse_p(std::span<Complex> spectrum, std::span<double> field) const;
  void forward_x(std::span<const double> field, std::span<Complex> spectrum) const;
  void inverse_x(std::span<Complex> spectrum, std::span<double> field) const;

 private:
  struct Plans;

  GridSpec spec_;
  double dx_;
  double dp_;
  SpectralTables tables_;
  std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(const GridSpec& spec);

/// Real quasi-probability density sampled on a Grid. Values may be negative.
struct WignerField {
  GridPtr grid;
  RealBuffer values;

  WignerField() = default;
  explicit WignerField(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}

  double& at(std::size_t i, std::size_t j) { return values[i * grid->np() + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * grid->np() + j]; }
};

/// Riemann sum of the field over the box.
double integrate(const WignerField& field);

/// Riemann sum of the squared field over the box.
double l2_norm_sq(const WignerField& field);

/// L2 distance between two fields on the same grid.
double l2_distance(const WignerField& a, const WignerField& b);

/// Mass in the outer band of the box (the given fraction of each side length).
double tail_mass(const WignerField& field, double band_fraction = 0.05);

}  // namespace wigner
