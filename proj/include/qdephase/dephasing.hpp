#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "qdephase/interferometer.hpp"
#include "qdephase/noise_model.hpp"

namespace qdephase {

enum class Method { closed_form, contour, quadrature, monte_carlo };

/// Phase variance and its split into the omega0 resonance and the
/// zero-frequency contribution.
struct DephasingResult {
  double sigma2 = 0.0;
  double term_resonant = 0.0;
  double term_zero_freq = 0.0;
  /// Residues at the spectral poles off the real axis; contour route only.
  double term_spectral_poles = 0.0;
  double dephasing_factor = 1.0;  // exp(-sigma2 / 2)
  double error_estimate = 0.0;    // absolute; quadrature only
  Method method = Method::closed_form;
};

/// Spectral values entering the residue form. `*_zero` are the omega -> 0
/// limits, not values at a finite cutoff. Noise is assumed isotropic
/// (S_axax == S_ayay == s_*).
struct ResonanceSpectra {
  double s_at_omega0 = 0.0;
  double cospectrum_at_omega0 = 0.0;
  double s_at_zero = 0.0;
  double cospectrum_at_zero = 0.0;
};

/// sigma^2 = 8 pi^2 m^2 A0^2 / (hbar^2 omega0) [S(w0) + sin2t Sbar(w0) + 2 S(0)
/// + 2 sin2t Sbar(0)]. Throws Error(numerical) when a term comes out negative,
/// which only happens for spectra violating the Cauchy-Schwarz bound.
DephasingResult sigma2_generic(const InterferometerParams& p, const ResonanceSpectra& s);

/// Two-Lorentzian closed form for the directly coupled apparatus (inertial
/// spectra vanish at zero frequency, so term_zero_freq == 0). Rejects gamma = 0
/// with omega0^2 == Omega0^2 +- k.
DephasingResult sigma2_closed(const InterferometerParams& p, const NoiseParams& n);

/// sigma2_generic fed with analytic_cross_spectra at omega0 and 0. Works for
/// every coupling variant.
DephasingResult sigma2_residue(const InterferometerParams& p, const NoiseParams& n);

/// Full residue sum of the defining integral: the real-axis poles at 0 and
/// +-omega0 (which alone give sigma2_residue) plus the poles of the inertial
/// spectra in the upper half plane, each evaluated by a trapezoid contour
/// integral on a small circle. Requires gamma > 0.
DephasingResult sigma2_contour(const InterferometerParams& p, const NoiseParams& n);

/// Returns (S_aa(omega), co-spectrum(omega)) for real omega.
using SpectrumFunction = std::function<std::pair<double, double>(double)>;

struct QuadratureOptions {
  double rel_tol = 1e-9;
  /// Upper integration limit; <= 0 selects 200 * max(omega0, frequency_scale).
  double omega_max = 0.0;
  /// Characteristic frequency of the spectrum (Omega0 for inertial noise).
  double frequency_scale = 0.0;
  /// Extra partition points inside (0, omega_max), e.g. spectral peaks.
  std::vector<double> breakpoints;
  std::size_t max_intervals = 50000;
};

/// sigma^2 = 4 m^2 A0^2 / hbar^2 int_R [S_aa + sin2t Sbar] F0 dw by adaptive
/// quadrature on the real axis. The integrand must be even. The F0 ~ 4 w0^4/w^6
/// envelope bounds the neglected tail; error_estimate includes that bound.
/// Throws QuadratureError when the achieved error exceeds rel_tol.
DephasingResult sigma2_quadrature(const InterferometerParams& p,
                                  const SpectrumFunction& spectra,
                                  const QuadratureOptions& opt = {});

/// Quadrature over the analytic inertial spectra, with break points placed
/// around the susceptibility poles.
DephasingResult sigma2_quadrature(const InterferometerParams& p, const NoiseParams& n,
                                  double rel_tol = 1e-9);

struct SnrResult {
  double signal_phase = 0.0;
  double sigma = 0.0;
  double snr = 0.0;
};

/// signal_phase / sqrt(sigma2_closed). Throws Error(numerical) when sigma == 0.
SnrResult snr(const InterferometerParams& p, const NoiseParams& n, double g);

enum class OptimizeVariable { theta, k, gamma };

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

struct OptimumResult {
  double argmin = 0.0;
  double min_sigma2 = 0.0;
  bool flat_objective = false;
};

/// Minimizes sigma2_closed over one variable: a coarse scan brackets the
/// global minimum, golden-section search refines it.
OptimumResult optimize(const InterferometerParams& p, const NoiseParams& n,
                       OptimizeVariable vary, Bounds bounds);

}  // namespace qdephase
