#pragma once

#include <numbers>

namespace qdephase {

/// Reduced Planck constant [J s] (CODATA 2018, exact).
inline constexpr double kHbar = 1.054571817e-34;

/// Qubit-driven two-dimensional interferometer. Both arms oscillate in a
/// harmonic trap of frequency omega0 with a qubit-dependent displacement
/// A0 = coupling / (mass * omega0^2) along the Bloch-axis direction theta.
struct InterferometerParams {
  double mass = 1.0;      // [kg]
  double omega0 = 1.0;    // trap angular frequency [rad/s]
  double coupling = 1.0;  // qubit-position coupling g_c [N]
  double theta = 0.0;     // Bloch-axis deflection [rad]
  double hbar = kHbar;    // [J s]

  /// m = hbar = 1; coupling chosen so that amplitude() == a0.
  static InterferometerParams normalized(double omega0, double a0, double theta);

  double amplitude() const { return coupling / (mass * omega0 * omega0); }
  double period() const { return 2.0 * std::numbers::pi / omega0; }

  /// Throws Error(invalid_argument) naming the offending field.
  void validate() const;
};

struct Displacement {
  double dx = 0.0;
  double dy = 0.0;
};

/// Transfer-function values [m^2 s^2] at one angular frequency. Rank one:
/// fxy^2 == fxx * fyy.
struct TransferMatrix {
  double fxx = 0.0;
  double fyy = 0.0;
  double fxy = 0.0;  // == fyx
};

/// Arm separation x+ - x-, y+ - y- at time t within one trap period.
Displacement differential_trajectory(const InterferometerParams& p, double t);

/// |int_0^{2pi/omega0} (1 - cos omega0 t) e^{i omega t} dt|^2.
///
/// The closed form 4 omega0^4 sin^2(pi omega/omega0) / (omega^2 (omega^2 -
/// omega0^2)^2) has removable singularities at 0 and +-omega0; inside a
/// relative distance of kF0SeriesThreshold from them a second-order series is
/// used instead.
double transfer_f0(double omega, double omega0);

inline constexpr double kF0SeriesThreshold = 1e-4;

TransferMatrix transfer_matrix(const InterferometerParams& p, double omega);

/// Gravimeter phase 2 pi m g A0 cos(theta) / (hbar omega0).
double signal_phase(const InterferometerParams& p, double g);

}  // namespace qdephase
