#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wigner/grid.hpp"

namespace wigner {

/// One time-stamped sample of the observables. s2_rate and identity_residual
/// are filled in once neighbouring samples exist (see fill_rates).
struct DiagnosticsRecord {
  double t = 0.0;
  double purity = 0.0;
  double s2 = 0.0;
  double s2_rate = 0.0;
  double chi2_full = 0.0;
  double chi2_p = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
  double mass_residual = 0.0;
  double identity_residual = 0.0;
};

enum class Gradient { full, p_only };

struct Moments {
  double mass = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 0.0;
  double var_p = 0.0;
};

/// 2 pi hbar times the integral of rho squared.
double purity(const WignerField& field, double hbar);

/// ln(purity). Throws NumericalError for non-positive purity.
double entropy_s2(const WignerField& field, double hbar);
double entropy_from_purity(double purity);

/// Structure measure -Tr[rho lap rho] / Tr[rho^2] with spectral derivatives.
/// The p_only variant keeps only the momentum part of the Laplacian.
double chi_squared(const WignerField& field, Gradient variant);

/// Both variants from one pair of transforms: {full, p_only}.
std::pair<double, double> chi_squared_both(const WignerField& field);

Moments moments(const WignerField& field);

/// Everything that can be computed from a single snapshot.
DiagnosticsRecord measure(const WignerField& field, double t, double hbar);

/// Centered-difference dS2/dt (one-sided at the ends) and the identity
/// residual for every record. Requires at least two records for rates.
void fill_rates(std::vector<DiagnosticsRecord>& series, double D);

/// Residual of dS2/dt = -2 D chi2_p at interior samples, i.e. indices
/// 1..n-2. Relative to |dS2/dt| when D > 0; absolute |dS2/dt| when D == 0.
/// Throws DataError for fewer than three samples or non-uniform spacing.
std::vector<double> identity_residual(std::span<const DiagnosticsRecord> series, double D);

/// The series without a final record that sits off the regular time grid
/// (a run whose duration is not a multiple of the record interval).
std::span<const DiagnosticsRecord> uniform_prefix(std::span<const DiagnosticsRecord> series);

/// Column order shared by the CSV and JSONL writers.
const std::vector<std::string>& csv_columns();

/// Header line, no provenance.
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const DiagnosticsRecord& r);
void write_jsonl_row(std::ostream& out, const DiagnosticsRecord& r);

/// Inverse of write_csv_row; comment lines starting with '#' and the header
/// are skipped by read_csv.
std::vector<DiagnosticsRecord> read_csv(std::istream& in);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace wigner
