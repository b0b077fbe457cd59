#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace qdephase {

using Complex = std::complex<double>;

struct Uncoupled {};

/// Elastic X-Y coupling k X Y of the apparatus [rad^2/s^2].
struct DirectCoupling {
  double k = 0.0;
};

/// Coriolis coupling 2 Omega_r (X dY/dt - Y dX/dt) [rad/s].
struct Coriolis {
  double rate = 0.0;
};

using Coupling = std::variant<Uncoupled, DirectCoupling, Coriolis>;

/// Damped two-dimensional apparatus driven by isotropic white noise.
///
/// All frequencies are angular [rad/s]. The white-noise level s0 follows the
/// correlation convention E[A(t) A(t')] = 2 pi s0 delta(t - t').
struct NoiseParams {
  double apparatus_omega = 1.0;  // Omega0
  double gamma = 0.0;
  double s0 = 1.0;
  Coupling coupling = Uncoupled{};

  /// Rejects Omega0 <= 0, gamma < 0, s0 < 0 and |k| >= Omega0^2.
  void validate() const;

  bool is_coriolis() const { return std::holds_alternative<Coriolis>(coupling); }

  /// Direct-coupling constant; 0 for the uncoupled model. Throws
  /// Error(wrong_variant) for Coriolis.
  double direct_k() const;

  /// Coriolis rate; 0 for non-Coriolis models.
  double coriolis_rate() const;
};

using Matrix2c = std::array<std::array<Complex, 2>, 2>;

/// Position response chi(omega) = T / det T to the driving acceleration.
Matrix2c susceptibility(const NoiseParams& n, double omega);

/// Acceleration spectra at one frequency.
struct SpectralPoint {
  double sxx = 0.0;
  double syy = 0.0;
  Complex sxy{};
};

inline constexpr std::string_view kSpectralConvention =
    "two-sided angular-frequency; E[a_i(t) a_j(t+tau)] = int S_ij(w) e^{-i w tau} dw";

struct CrossSpectralMatrix {
  std::vector<double> omega;
  std::vector<double> sxx;
  std::vector<double> syy;
  std::vector<Complex> sxy;

  std::size_t size() const { return omega.size(); }
};

SpectralPoint analytic_cross_spectrum(const NoiseParams& n, double omega);
CrossSpectralMatrix analytic_cross_spectra(const NoiseParams& n,
                                           std::span<const double> grid);

/// Position spectra of U = (X+Y)/sqrt2 and V = (X-Y)/sqrt2.
struct NormalModeSpectra {
  double suu = 0.0;
  double svv = 0.0;
};

NormalModeSpectra normal_mode_spectra(const NoiseParams& n, double omega);

/// Roots of det T(omega) = 0. Order: omega_1, omega_2 (Omega0^2 - k branch),
/// omega_3, omega_4 (Omega0^2 + k branch).
struct PoleSet {
  std::array<Complex, 4> poles;
};

PoleSet poles(const NoiseParams& n);

/// det T evaluated at a complex frequency; used to back-substitute poles.
Complex susceptibility_determinant(const NoiseParams& n, Complex omega);

enum class PeakDetection { analytic, grid_search };

struct PeakInfo {
  std::vector<double> peak_frequencies;
  std::vector<std::optional<double>> q_factors;  // nullopt when gamma == 0
  PeakDetection detection = PeakDetection::analytic;
};

struct PeakReport {
  PeakInfo analytic;
  PeakInfo grid_search;
};

PeakReport peaks_and_q(const NoiseParams& n, std::span<const double> grid);

/// Log-spaced grid with `per_decade` intervals per decade, both ends included.
std::vector<double> log_grid(double lo, double hi, std::size_t per_decade);

/// [1e-2, 1e2] * Omega0 at 2048 points per decade.
std::vector<double> default_peak_grid(const NoiseParams& n);

}  // namespace qdephase
