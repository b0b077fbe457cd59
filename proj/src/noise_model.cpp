#include "qdephase/noise_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdephase/error.hpp"

namespace qdephase {

namespace {

void require(bool ok, const std::string& field, const char* constraint) {
  if (!ok) throw Error(ErrorCode::invalid_argument, "noise." + field + ": " + constraint);
}

// (Omega0^2 + shift - w^2)^2 + w^2 gamma^2: |det| factor of one normal mode.
double lorentz_denominator(const NoiseParams& n, double shift, double w) {
  const double d = n.apparatus_omega * n.apparatus_omega + shift - w * w;
  return d * d + w * w * n.gamma * n.gamma;
}

Complex diagonal_element(const NoiseParams& n, Complex w) {
  return n.apparatus_omega * n.apparatus_omega - w * w + Complex(0.0, 1.0) * w * n.gamma;
}

}  // namespace

void NoiseParams::validate() const {
  require(std::isfinite(apparatus_omega) && apparatus_omega > 0.0, "Omega0", "must be > 0");
  require(std::isfinite(gamma) && gamma >= 0.0, "gamma", "must be >= 0");
  require(std::isfinite(s0) && s0 >= 0.0, "S0", "must be >= 0");
  if (const auto* d = std::get_if<DirectCoupling>(&coupling)) {
    require(std::isfinite(d->k), "k", "must be finite");
    require(std::abs(d->k) < apparatus_omega * apparatus_omega, "k",
            "|k| must be < Omega0^2");
  } else if (const auto* c = std::get_if<Coriolis>(&coupling)) {
    require(std::isfinite(c->rate), "Omega_r", "must be finite");
  }
}

double NoiseParams::direct_k() const {
  if (const auto* d = std::get_if<DirectCoupling>(&coupling)) return d->k;
  if (is_coriolis()) {
    throw Error(ErrorCode::wrong_variant,
                "normal modes defined only for direct coupling");
  }
  return 0.0;
}

double NoiseParams::coriolis_rate() const {
  if (const auto* c = std::get_if<Coriolis>(&coupling)) return c->rate;
  return 0.0;
}

Complex susceptibility_determinant(const NoiseParams& n, Complex w) {
  const Complex a = diagonal_element(n, w);
  if (n.is_coriolis()) {
    const double r = n.coriolis_rate();
    return a * a - 4.0 * w * w * r * r;
  }
  const double k = n.direct_k();
  return a * a - k * k;
}

Matrix2c susceptibility(const NoiseParams& n, double omega) {
  const Complex a = diagonal_element(n, omega);
  Complex off_upper;
  Complex off_lower;
  if (n.is_coriolis()) {
    off_upper = Complex(0.0, 2.0 * omega * n.coriolis_rate());
    off_lower = -off_upper;
  } else {
    off_upper = off_lower = n.direct_k();
  }
  const Complex det = a * a - off_upper * off_lower;
  return {{{a / det, off_upper / det}, {off_lower / det, a / det}}};
}

SpectralPoint analytic_cross_spectrum(const NoiseParams& n, double omega) {
  const double w2 = omega * omega;
  const double w4s0 = w2 * w2 * n.s0;
  const double om2 = n.apparatus_omega * n.apparatus_omega;
  const double g2 = n.gamma * n.gamma;
  SpectralPoint out;
  if (n.is_coriolis()) {
    const double r = n.coriolis_rate();
    const double det2 = std::norm(susceptibility_determinant(n, omega));
    const double diag = (om2 - w2) * (om2 - w2) + w2 * (g2 + 4.0 * r * r);
    out.sxx = out.syy = w4s0 * diag / det2;
    out.sxy = Complex(0.0, w4s0 * 4.0 * omega * r * (om2 - w2) / det2);
    return out;
  }
  const double k = n.direct_k();
  const double det2 = lorentz_denominator(n, -k, omega) * lorentz_denominator(n, k, omega);
  out.sxx = out.syy = w4s0 * ((om2 - w2) * (om2 - w2) + w2 * g2 + k * k) / det2;
  out.sxy = w4s0 * 2.0 * k * (om2 - w2) / det2;
  return out;
}

CrossSpectralMatrix analytic_cross_spectra(const NoiseParams& n,
                                           std::span<const double> grid) {
  CrossSpectralMatrix m;
  m.omega.assign(grid.begin(), grid.end());
  m.sxx.reserve(grid.size());
  m.syy.reserve(grid.size());
  m.sxy.reserve(grid.size());
  for (double w : grid) {
    const SpectralPoint p = analytic_cross_spectrum(n, w);
    m.sxx.push_back(p.sxx);
    m.syy.push_back(p.syy);
    m.sxy.push_back(p.sxy);
  }
  return m;
}

NormalModeSpectra normal_mode_spectra(const NoiseParams& n, double omega) {
  const double k = n.direct_k();
  return {n.s0 / lorentz_denominator(n, -k, omega), n.s0 / lorentz_denominator(n, k, omega)};
}

PoleSet poles(const NoiseParams& n) {
  const double k = n.direct_k();
  const double om2 = n.apparatus_omega * n.apparatus_omega;
  const Complex half_damping(0.0, 0.5 * n.gamma);
  PoleSet out;
  std::size_t i = 0;
  for (double shift : {-k, k}) {
    const Complex root = 0.5 * std::sqrt(Complex(4.0 * (om2 + shift) - n.gamma * n.gamma, 0.0));
    out.poles[i++] = half_damping + root;
    out.poles[i++] = half_damping - root;
  }
  return out;
}

PeakReport peaks_and_q(const NoiseParams& n, std::span<const double> grid) {
  const double k = n.direct_k();
  const double om2 = n.apparatus_omega * n.apparatus_omega;
  auto q_of = [&](double peak) -> std::optional<double> {
    if (n.gamma > 0.0) return peak / n.gamma;
    return std::nullopt;
  };

  PeakReport report;
  report.analytic.detection = PeakDetection::analytic;
  const double lo = std::min(-k, k);
  for (double shift : {lo, -lo}) {
    const double radicand = om2 + shift - 0.25 * n.gamma * n.gamma;
    if (radicand <= 0.0) continue;
    const double peak = std::sqrt(radicand);
    if (!report.analytic.peak_frequencies.empty() &&
        report.analytic.peak_frequencies.back() == peak) {
      continue;  // k = 0: degenerate modes
    }
    report.analytic.peak_frequencies.push_back(peak);
    report.analytic.q_factors.push_back(q_of(peak));
  }

  report.grid_search.detection = PeakDetection::grid_search;
  if (grid.size() >= 3) {
    const CrossSpectralMatrix s = analytic_cross_spectra(n, grid);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      if (s.sxx[i] > s.sxx[i - 1] && s.sxx[i] >= s.sxx[i + 1]) {
        report.grid_search.peak_frequencies.push_back(grid[i]);
        report.grid_search.q_factors.push_back(q_of(grid[i]));
      }
    }
  }
  return report;
}

std::vector<double> log_grid(double lo, double hi, std::size_t per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || per_decade == 0) {
    throw Error(ErrorCode::invalid_argument, "log_grid: need 0 < lo < hi and per_decade > 0");
  }
  const double decades = std::log10(hi / lo);
  const auto intervals = static_cast<std::size_t>(std::ceil(decades * per_decade - 1e-9));
  std::vector<double> g(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    g[i] = lo * std::pow(10.0, decades * static_cast<double>(i) / static_cast<double>(intervals));
  }
  g.back() = hi;
  return g;
}

std::vector<double> default_peak_grid(const NoiseParams& n) {
  return log_grid(1e-2 * n.apparatus_omega, 1e2 * n.apparatus_omega, 2048);
}

}  // namespace qdephase
