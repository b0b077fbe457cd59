#include "qdephase/interferometer.hpp"

#include <cmath>
#include <string>

#include "qdephase/error.hpp"

namespace qdephase {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* field, const char* constraint) {
  if (!ok) {
    throw Error(ErrorCode::invalid_argument,
                std::string("interferometer.") + field + ": " + constraint);
  }
}

// sin^2(pi e) / e^2 to second order in e.
double sinc2_series(double e) {
  return kPi * kPi * (1.0 - kPi * kPi * e * e / 3.0);
}

}  // namespace

InterferometerParams InterferometerParams::normalized(double omega0, double a0,
                                                      double theta) {
  InterferometerParams p;
  p.mass = 1.0;
  p.hbar = 1.0;
  p.omega0 = omega0;
  p.coupling = a0 * omega0 * omega0;
  p.theta = theta;
  return p;
}

void InterferometerParams::validate() const {
  require(std::isfinite(mass) && mass > 0.0, "mass", "must be > 0");
  require(std::isfinite(omega0) && omega0 > 0.0, "omega0", "must be > 0");
  require(std::isfinite(coupling) && coupling >= 0.0, "coupling", "must be >= 0");
  require(std::isfinite(theta), "theta", "must be finite");
  require(std::isfinite(hbar) && hbar > 0.0, "hbar", "must be > 0");
}

Displacement differential_trajectory(const InterferometerParams& p, double t) {
  const double r = 2.0 * p.amplitude() * (1.0 - std::cos(p.omega0 * t));
  return {r * std::cos(p.theta), r * std::sin(p.theta)};
}

double transfer_f0(double omega, double omega0) {
  const double x = std::abs(omega) / omega0;
  const double scale = 4.0 / (omega0 * omega0);
  if (x < kF0SeriesThreshold) {
    // sin^2(pi x)/x^2 over (1 - x^2)^2, both to second order.
    return scale * sinc2_series(x) / (1.0 - 2.0 * x * x);
  }
  const double e = x - 1.0;
  if (std::abs(e) < kF0SeriesThreshold) {
    // (x^2 - 1)^2 = e^2 (2 + e)^2 and sin^2(pi x) = sin^2(pi e).
    const double d = (1.0 + e) * (2.0 + e);
    return scale * sinc2_series(e) / (d * d);
  }
  const double s = std::sin(kPi * x);
  const double d = x * (x - 1.0) * (x + 1.0);
  return scale * s * s / (d * d);
}

TransferMatrix transfer_matrix(const InterferometerParams& p, double omega) {
  const double a0 = p.amplitude();
  const double f = 4.0 * a0 * a0 * transfer_f0(omega, p.omega0);
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  return {f * c * c, f * s * s, f * s * c};
}

double signal_phase(const InterferometerParams& p, double g) {
  return 2.0 * kPi * p.mass * g * p.amplitude() * std::cos(p.theta) / (p.hbar * p.omega0);
}

}  // namespace qdephase
