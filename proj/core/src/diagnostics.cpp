#include "wigner/diagnostics.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wigner/errors.hpp"

namespace wigner {

namespace {

// Weight of a half-spectrum bin in the full Hermitian spectrum.
double hermitian_weight(std::size_t l, std::size_t n) {
  return (l == 0 || 2 * l == n) ? 1.0 : 2.0;
}

struct SpectralSums {
  double power = 0.0;
  double weighted = 0.0;
};

SpectralSums p_sums(const WignerField& field) {
  const Grid& g = *field.grid;
  ComplexBuffer spec(g.p_spectrum_size());
  g.forward_p(field.values, spec);
  const auto& lam = g.tables().lam;
  const std::size_t h = g.half_np();
  SpectralSums s;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const Complex* row = spec.data() + i * h;
    for (std::size_t l = 0; l < h; ++l) {
      const double w = hermitian_weight(l, g.np()) * std::norm(row[l]);
      s.power += w;
      s.weighted += w * lam[l] * lam[l];
    }
  }
  return s;
}

SpectralSums x_sums(const WignerField& field) {
  const Grid& g = *field.grid;
  ComplexBuffer spec(g.x_spectrum_size());
  g.forward_x(field.values, spec);
  const auto& kx = g.tables().kx;
  SpectralSums s;
  const std::size_t h = g.half_nx();
  for (std::size_t j = 0; j < g.np(); ++j) {
    const Complex* row = spec.data() + j * h;
    for (std::size_t k = 0; k < h; ++k) {
      const double w = hermitian_weight(k, g.nx()) * std::norm(row[k]);
      s.power += w;
      s.weighted += w * kx[k] * kx[k];
    }
  }
  return s;
}

void require_structure(const SpectralSums& s) {
  if (!(s.power > 0.0) || !std::isfinite(s.power)) {
    throw NumericalError("chi_squared: undefined for a zero or non-finite field");
  }
}

}  // namespace

double purity(const WignerField& field, double hbar) {
  return 2.0 * std::numbers::pi * hbar * l2_norm_sq(field);
}

double entropy_from_purity(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw NumericalError("entropy_s2: purity must be positive, got " + format_double(p));
  }
  return std::log(p);
}

double entropy_s2(const WignerField& field, double hbar) {
  return entropy_from_purity(purity(field, hbar));
}

double chi_squared(const WignerField& field, Gradient variant) {
  const SpectralSums sp = p_sums(field);
  require_structure(sp);
  const double chi_p = sp.weighted / sp.power;
  if (variant == Gradient::p_only) return chi_p;
  const SpectralSums sx = x_sums(field);
  require_structure(sx);
  return chi_p + sx.weighted / sx.power;
}

std::pair<double, double> chi_squared_both(const WignerField& field) {
  const SpectralSums sp = p_sums(field);
  const SpectralSums sx = x_sums(field);
  require_structure(sp);
  require_structure(sx);
  const double chi_p = sp.weighted / sp.power;
  return {chi_p + sx.weighted / sx.power, chi_p};
}

Moments moments(const WignerField& field) {
  const Grid& g = *field.grid;
  double m0 = 0.0, mx = 0.0, mp = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double x = g.x(i);
    for (std::size_t j = 0; j < g.np(); ++j) {
      const double v = field.at(i, j);
      m0 += v;
      mx += v * x;
      mp += v * g.p(j);
    }
  }
  Moments out;
  out.mass = m0 * g.cell_area();
  if (m0 == 0.0) return out;
  out.mean_x = mx / m0;
  out.mean_p = mp / m0;
  double vx = 0.0, vp = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double ux = g.x(i) - out.mean_x;
    for (std::size_t j = 0; j < g.np(); ++j) {
      const double up = g.p(j) - out.mean_p;
      const double v = field.at(i, j);
      vx += v * ux * ux;
      vp += v * up * up;
    }
  }
  out.var_x = vx / m0;
  out.var_p = vp / m0;
  return out;
}

DiagnosticsRecord measure(const WignerField& field, double t, double hbar) {
  DiagnosticsRecord r;
  r.t = t;
  r.purity = purity(field, hbar);
  r.s2 = entropy_from_purity(r.purity);
  const auto [full, ponly] = chi_squared_both(field);
  r.chi2_full = full;
  r.chi2_p = ponly;
  const Moments m = moments(field);
  r.mean_x = m.mean_x;
  r.mean_p = m.mean_p;
  r.var_x = m.var_x;
  r.var_p = m.var_p;
  r.mass_residual = m.mass - 1.0;
  return r;
}

namespace {
double residual_value(double rate, double chi2_p, double D) {
  if (D == 0.0) return std::abs(rate);
  const double denom = std::max(std::abs(rate), 1e-300);
  return std::abs(rate + 2.0 * D * chi2_p) / denom;
}
}  // namespace

void fill_rates(std::vector<DiagnosticsRecord>& series, double D) {
  const std::size_t n = series.size();
  if (n < 2) {
    for (auto& r : series) {
      r.s2_rate = 0.0;
      r.identity_residual = 0.0;
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    series[i].s2_rate = (series[hi].s2 - series[lo].s2) / (series[hi].t - series[lo].t);
    series[i].identity_residual = residual_value(series[i].s2_rate, series[i].chi2_p, D);
  }
}

std::vector<double> identity_residual(std::span<const DiagnosticsRecord> series, double D) {
  const std::size_t n = series.size();
  if (n < 3) throw DataError("identity_residual: need at least 3 samples");
  const double h = series[1].t - series[0].t;
  if (!(h > 0.0)) throw DataError("identity_residual: sample times must increase");
  for (std::size_t i = 1; i < n; ++i) {
    const double step = series[i].t - series[i - 1].t;
    if (std::abs(step - h) > 1e-9 * h + 1e-12) {
      throw DataError("identity_residual: recording interval is not uniform");
    }
  }
  std::vector<double> out;
  out.reserve(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double rate = (series[i + 1].s2 - series[i - 1].s2) / (series[i + 1].t - series[i - 1].t);
    out.push_back(residual_value(rate, series[i].chi2_p, D));
  }
  return out;
}

std::span<const DiagnosticsRecord> uniform_prefix(std::span<const DiagnosticsRecord> series) {
  const std::size_t n = series.size();
  if (n < 3) return series;
  const double h = series[1].t - series[0].t;
  const double last = series[n - 1].t - series[n - 2].t;
  if (std::abs(last - h) > 1e-9 * h + 1e-12) return series.first(n - 1);
  return series;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "t",      "purity", "s2",    "s2_rate", "chi2_full",     "chi2_p",
      "mean_x", "mean_p", "var_x", "var_p",   "mass_residual", "identity_residual"};
  return cols;
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& out) {
  const auto& cols = csv_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n';
}

namespace {
std::array<double, 12> fields_of(const DiagnosticsRecord& r) {
  return {r.t,      r.purity, r.s2,    r.s2_rate, r.chi2_full,     r.chi2_p,
          r.mean_x, r.mean_p, r.var_x, r.var_p,   r.mass_residual, r.identity_residual};
}
}  // namespace

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
  const auto f = fields_of(r);
  for (std::size_t c = 0; c < f.size(); ++c) out << (c ? "," : "") << format_double(f[c]);
  out << '\n';
}

void write_jsonl_row(std::ostream& out, const DiagnosticsRecord& r) {
  const auto f = fields_of(r);
  const auto& cols = csv_columns();
  out << '{';
  for (std::size_t c = 0; c < f.size(); ++c) {
    out << (c ? "," : "") << '"' << cols[c] << "\":";
    // JSON has no literal for non-finite values.
    if (std::isfinite(f[c])) {
      out << format_double(f[c]);
    } else {
      out << "null";
    }
  }
  out << "}\n";
}

std::vector<DiagnosticsRecord> read_csv(std::istream& in) {
  std::vector<DiagnosticsRecord> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::array<double, 12> f{};
    std::istringstream row(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(row, cell, ',') && c < f.size()) f[c++] = std::stod(cell);
    if (c != f.size()) throw DataError("read_csv: malformed row: " + line);
    DiagnosticsRecord r;
    r.t = f[0];
    r.purity = f[1];
    r.s2 = f[2];
    r.s2_rate = f[3];
    r.chi2_full = f[4];
    r.chi2_p = f[5];
    r.mean_x = f[6];
    r.mean_p = f[7];
    r.var_x = f[8];
    r.var_p = f[9];
    r.mass_residual = f[10];
    r.identity_residual = f[11];
    out.push_back(r);
  }
  return out;
}

}  // namespace wigner
