#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "qdephase/noise_model.hpp"

namespace qdephase {

struct SimConfig {
  double dt = 0.05;
  std::size_t n_steps = 0;
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
  bool record_noise = false;

  /// dt > 0, burn_in < n_steps, and dt times the fastest normal frequency
  /// below kStabilityLimit.
  void validate(const NoiseParams& n) const;

  /// Ten damping times, capped at n_steps / 2.
  static std::size_t default_burn_in(const NoiseParams& n, double dt, std::size_t n_steps);
};

inline constexpr double kStabilityLimit = 0.1;

/// Largest undamped normal-mode frequency of the apparatus.
double fastest_mode_frequency(const NoiseParams& n);

struct ApparatusState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

struct NoiseSample {
  double ax = 0.0;
  double ay = 0.0;
};

/// Time derivative of the state for the selected coupling variant.
ApparatusState apparatus_rhs(const ApparatusState& s, NoiseSample a, const NoiseParams& n);

/// Classical RK4 with the stochastic midpoint: both middle stages see the
/// average of the noise samples at t_n and t_{n+1}.
ApparatusState rk4_step(const ApparatusState& s, NoiseSample now, NoiseSample next,
                        double dt, const NoiseParams& n);

/// Independent Gaussian pairs of per-sample variance 2 pi s0 / dt.
class WhiteNoiseSource {
 public:
  WhiteNoiseSource(double s0, double dt, std::uint64_t seed);
  NoiseSample next();

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  double scale_;
};

struct WhiteNoiseSeries {
  std::vector<double> x;
  std::vector<double> y;
};

WhiteNoiseSeries white_noise_series(double s0, double dt, std::size_t n, std::uint64_t seed);

struct TrajectoryRecord {
  std::vector<double> t;
  std::vector<double> x, y;
  std::vector<double> vx, vy;
  std::vector<double> ax, ay;
  std::vector<double> noise_x, noise_y;  // empty unless recorded

  std::size_t size() const { return t.size(); }
  bool has_noise() const { return !noise_x.empty(); }
};

/// Zero initial conditions; the first burn_in states are discarded.
/// Accelerations come from the right-hand side, so a = d^2X/dt^2 exactly at
/// the sample times.
TrajectoryRecord simulate(const NoiseParams& n, const SimConfig& c);

struct AccelerationSeries {
  std::vector<double> x;
  std::vector<double> y;
};

/// Inertial noise on the test mass: da = -d^2X/dt^2.
AccelerationSeries acceleration_series(const TrajectoryRecord& rec);

/// Counter-based seed splitting (splitmix64 of master and index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace qdephase
