#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qdephase/langevin.hpp"
#include "qdephase/noise_model.hpp"

namespace qdephase {

enum class Window { hann, rectangular };

struct WelchConfig {
  std::size_t n_segments = 10;
  double overlap = 0.5;
  Window window = Window::hann;

  void validate() const;
};

/// Welch estimate on omega >= 0 (bins 0 .. L/2) of the two-sided density in
/// the library convention (see kSpectralConvention). The negative-frequency
/// half is the complex conjugate.
struct EstimatedSpectrum {
  std::vector<double> omega;
  std::vector<double> sxx;
  std::vector<double> syy;
  std::vector<Complex> sxy;
  /// Standard errors of the segment average, from the segment scatter.
  std::vector<double> sxy_re_stderr;
  std::vector<double> sxy_im_stderr;
  std::size_t n_averages = 0;
  std::size_t segment_length = 0;
  double dt = 0.0;

  std::size_t size() const { return omega.size(); }
  double bin_width() const;

  /// sum over all two-sided bins of sxx * d_omega.
  double integrated_power_x() const;

  /// Full grid -pi/dt < omega <= pi/dt, ordered by frequency.
  CrossSpectralMatrix two_sided() const;

  /// Bins where |sxy| exceeds sqrt(sxx syy) beyond rounding.
  std::size_t schwarz_violations() const;
};

/// w[j] = 0.5 (1 - cos(2 pi j / (n - 1))). Throws for n < 2.
std::vector<double> hann_window(std::size_t n);

/// In-place radix-2 forward DFT, X_k = sum_n x_n e^{-2 pi i k n / N}.
/// The length must be a power of two.
void fft_radix2(std::span<Complex> data);

/// Segment length chosen for (n_samples, cfg): largest power of two not
/// exceeding n_samples / (1 + (K - 1)(1 - overlap)).
std::size_t welch_segment_length(std::size_t n_samples, const WelchConfig& cfg);

/// Mean-removed, windowed, overlapped segment periodograms averaged into
/// X Y^*. Normalized so white noise of per-sample variance 2 pi s0 / dt gives
/// a flat estimate s0.
EstimatedSpectrum cross_psd_welch(std::span<const double> x, std::span<const double> y,
                                  double dt, const WelchConfig& cfg);

/// cross_psd_welch on the inertial acceleration channels of a trajectory.
EstimatedSpectrum estimate_noise_spectra(const TrajectoryRecord& rec, double dt,
                                         const WelchConfig& cfg);

}  // namespace qdephase
