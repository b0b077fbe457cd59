#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qdephase/interferometer.hpp"
#include "qdephase/langevin.hpp"
#include "qdephase/noise_model.hpp"

namespace qdephase {

struct PhaseSample {
  double delta_phi = 0.0;
  std::uint64_t seed = 0;
};

/// (m / hbar) int_0^T [da_x dx(t) + da_y dy(t)] dt over exactly one trap
/// period T, trapezoidal on the sample grid. The last partial interval is
/// closed by linear interpolation, so the series needs floor(T/dt) + 2 samples
/// unless T/dt is an integer.
PhaseSample accumulate_phase(std::span<const double> dax, std::span<const double> day,
                             double dt, const InterferometerParams& p);

/// Number of samples accumulate_phase needs for one period.
std::size_t samples_per_period(const InterferometerParams& p, double dt);

struct McResult {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double variance_std_error = 0.0;  // variance * sqrt(2 / (n - 1))
  Complex dephasing_factor{1.0, 0.0};  // mean of exp(i dphi)
  double dephasing_std_error = 0.0;    // of the real part
  double excess_kurtosis = 0.0;
  /// Set when the variance is large enough that exp(-sigma2/2) sits below the
  /// Monte-Carlo noise floor.
  bool dephasing_unresolved = false;
  std::vector<PhaseSample> samples;
};

inline constexpr double kUnresolvedDephasingVariance = 4.0;

McResult summarize_phases(std::vector<PhaseSample> samples);

/// Runs `realizations` independent simulations, each with its own seed derived
/// from c.seed, and integrates one trap period starting at a uniformly random
/// offset after burn-in. When c.n_steps is 0 it is set to burn_in plus two
/// periods.
McResult mc_sigma2(const InterferometerParams& p, const NoiseParams& n, SimConfig c,
                   std::size_t realizations, unsigned threads = 0);

}  // namespace qdephase
