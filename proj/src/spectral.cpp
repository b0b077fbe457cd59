#include "qdephase/spectral.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qdephase/error.hpp"

namespace qdephase {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMinSegment = 16;

}  // namespace

void WelchConfig::validate() const {
  if (n_segments < 1) throw Error(ErrorCode::invalid_argument, "welch.segments: must be >= 1");
  if (!(overlap >= 0.0 && overlap <= 0.9)) {
    throw Error(ErrorCode::invalid_argument, "welch.overlap: must be in [0, 0.9]");
  }
}

double EstimatedSpectrum::bin_width() const {
  return 2.0 * kPi / (static_cast<double>(segment_length) * dt);
}

double EstimatedSpectrum::integrated_power_x() const {
  double total = 0.0;
  for (std::size_t j = 0; j < sxx.size(); ++j) {
    const bool edge = j == 0 || 2 * j == segment_length;
    total += (edge ? 1.0 : 2.0) * sxx[j];
  }
  return total * bin_width();
}

CrossSpectralMatrix EstimatedSpectrum::two_sided() const {
  CrossSpectralMatrix m;
  const std::size_t half = segment_length / 2;
  for (std::size_t j = half - 1; j >= 1; --j) {
    m.omega.push_back(-omega[j]);
    m.sxx.push_back(sxx[j]);
    m.syy.push_back(syy[j]);
    m.sxy.push_back(std::conj(sxy[j]));
  }
  for (std::size_t j = 0; j <= half && j < size(); ++j) {
    m.omega.push_back(omega[j]);
    m.sxx.push_back(sxx[j]);
    m.syy.push_back(syy[j]);
    m.sxy.push_back(sxy[j]);
  }
  return m;
}

std::size_t EstimatedSpectrum::schwarz_violations() const {
  std::size_t count = 0;
  for (std::size_t j = 0; j < size(); ++j) {
    if (std::abs(sxy[j]) > std::sqrt(sxx[j] * syy[j]) * (1.0 + 1e-12)) ++count;
  }
  return count;
}

std::vector<double> hann_window(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "hann_window: n must be >= 2");
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(j) / denom));
  }
  return w;
}

void fft_radix2(std::span<Complex> data) {
  const std::size_t n = data.size();
  if (n <= 1) return;
  if (!std::has_single_bit(n)) {
    throw Error(ErrorCode::invalid_argument, "fft_radix2: length must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  std::vector<Complex> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    twiddle[k] = Complex(std::cos(angle), std::sin(angle));
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex u = data[start + k];
        const Complex v = data[start + k + half] * twiddle[k * stride];
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
}

std::size_t welch_segment_length(std::size_t n_samples, const WelchConfig& cfg) {
  cfg.validate();
  const double span = 1.0 + static_cast<double>(cfg.n_segments - 1) * (1.0 - cfg.overlap);
  const auto raw = static_cast<std::size_t>(std::floor(static_cast<double>(n_samples) / span));
  return raw == 0 ? 0 : std::bit_floor(raw);
}

EstimatedSpectrum cross_psd_welch(std::span<const double> x, std::span<const double> y,
                                  double dt, const WelchConfig& cfg) {
  cfg.validate();
  if (x.size() != y.size()) {
    throw Error(ErrorCode::invalid_argument, "cross_psd_welch: series lengths differ");
  }
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "cross_psd_welch: dt must be > 0");
  const std::size_t len = welch_segment_length(x.size(), cfg);
  if (len < kMinSegment) {
    throw Error(ErrorCode::invalid_argument,
                "series too short for requested segmentation (" + std::to_string(x.size()) +
                    " samples, " + std::to_string(cfg.n_segments) + " segments)");
  }
  const auto step = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(static_cast<double>(len) * (1.0 - cfg.overlap))));
  const std::size_t n_avg = (x.size() - len) / step + 1;

  const std::vector<double> window =
      cfg.window == Window::hann ? hann_window(len) : std::vector<double>(len, 1.0);
  const double window_power =
      std::inner_product(window.begin(), window.end(), window.begin(), 0.0);
  const double scale = dt / (2.0 * kPi * window_power);

  const std::size_t bins = len / 2 + 1;
  std::vector<double> pxx(bins, 0.0), pyy(bins, 0.0);
  std::vector<Complex> pxy(bins);
  std::vector<double> re2(bins, 0.0), im2(bins, 0.0);
  std::vector<Complex> fx(len), fy(len);

  for (std::size_t s = 0; s < n_avg; ++s) {
    const auto xs = x.subspan(s * step, len);
    const auto ys = y.subspan(s * step, len);
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(len);
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(len);
    for (std::size_t i = 0; i < len; ++i) {
      fx[i] = (xs[i] - mx) * window[i];
      fy[i] = (ys[i] - my) * window[i];
    }
    fft_radix2(fx);
    fft_radix2(fy);
    for (std::size_t j = 0; j < bins; ++j) {
      const Complex c = fx[j] * std::conj(fy[j]) * scale;
      pxx[j] += std::norm(fx[j]) * scale;
      pyy[j] += std::norm(fy[j]) * scale;
      pxy[j] += c;
      re2[j] += c.real() * c.real();
      im2[j] += c.imag() * c.imag();
    }
  }

  EstimatedSpectrum out;
  out.dt = dt;
  out.segment_length = len;
  out.n_averages = n_avg;
  out.omega.resize(bins);
  out.sxx.resize(bins);
  out.syy.resize(bins);
  out.sxy.resize(bins);
  out.sxy_re_stderr.resize(bins);
  out.sxy_im_stderr.resize(bins);
  const double inv = 1.0 / static_cast<double>(n_avg);
  const double d_omega = out.bin_width();
  for (std::size_t j = 0; j < bins; ++j) {
    out.omega[j] = d_omega * static_cast<double>(j);
    out.sxx[j] = pxx[j] * inv;
    out.syy[j] = pyy[j] * inv;
    out.sxy[j] = pxy[j] * inv;
    if (n_avg > 1) {
      const double nm1 = static_cast<double>(n_avg - 1);
      const double var_re = (re2[j] - n_avg * out.sxy[j].real() * out.sxy[j].real()) / nm1;
      const double var_im = (im2[j] - n_avg * out.sxy[j].imag() * out.sxy[j].imag()) / nm1;
      out.sxy_re_stderr[j] = std::sqrt(std::max(var_re, 0.0) * inv);
      out.sxy_im_stderr[j] = std::sqrt(std::max(var_im, 0.0) * inv);
    } else {
      out.sxy_re_stderr[j] = out.sxy_im_stderr[j] = std::nan("");
    }
  }
  return out;
}

EstimatedSpectrum estimate_noise_spectra(const TrajectoryRecord& rec, double dt,
                                         const WelchConfig& cfg) {
  const AccelerationSeries a = acceleration_series(rec);
  return cross_psd_welch(a.x, a.y, dt, cfg);
}

}  // namespace qdephase
