#include "qdephase/dephasing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qdephase/error.hpp"
#include "qdephase/quadrature.hpp"

namespace qdephase {

namespace {

constexpr double kPi = std::numbers::pi;

// m^2 A0^2 / hbar^2
double phase_scale(const InterferometerParams& p) {
  const double r = p.mass * p.amplitude() / p.hbar;
  return r * r;
}

DephasingResult finish(DephasingResult r) {
  r.sigma2 = r.term_resonant + r.term_zero_freq + r.term_spectral_poles;
  r.dephasing_factor = std::exp(-0.5 * r.sigma2);
  return r;
}

// Rejects a clearly negative term, clamps rounding noise to zero.
double checked_term(double value, double magnitude) {
  if (value < -1e-12 * magnitude) {
    throw Error(ErrorCode::numerical, "cross-spectrum exceeds Schwarz bound");
  }
  return std::max(value, 0.0);
}

}  // namespace

DephasingResult sigma2_generic(const InterferometerParams& p, const ResonanceSpectra& s) {
  p.validate();
  const double k = 8.0 * kPi * kPi * phase_scale(p) / p.omega0;
  const double sin2t = std::sin(2.0 * p.theta);
  DephasingResult r;
  r.method = Method::closed_form;
  r.term_resonant =
      checked_term(k * (s.s_at_omega0 + sin2t * s.cospectrum_at_omega0),
                   k * (std::abs(s.s_at_omega0) + std::abs(s.cospectrum_at_omega0)));
  r.term_zero_freq =
      checked_term(2.0 * k * (s.s_at_zero + sin2t * s.cospectrum_at_zero),
                   2.0 * k * (std::abs(s.s_at_zero) + std::abs(s.cospectrum_at_zero)));
  return finish(r);
}

DephasingResult sigma2_closed(const InterferometerParams& p, const NoiseParams& n) {
  p.validate();
  n.validate();
  const double k = n.direct_k();
  const double w0 = p.omega0;
  const double om2 = n.apparatus_omega * n.apparatus_omega;
  const double damping = w0 * w0 * n.gamma * n.gamma;
  const double d_plus = (om2 + k - w0 * w0) * (om2 + k - w0 * w0) + damping;
  const double d_minus = (om2 - k - w0 * w0) * (om2 - k - w0 * w0) + damping;
  if (d_plus == 0.0 || d_minus == 0.0) {
    throw Error(ErrorCode::numerical,
                "undamped resonance: gamma = 0 with omega0^2 = Omega0^2 +- k gives infinite variance");
  }
  const double c = std::cos(p.theta + 0.25 * kPi);
  const double s = std::sin(p.theta + 0.25 * kPi);
  const double prefactor = 8.0 * kPi * kPi * phase_scale(p) * n.s0 * w0 * w0 * w0;
  DephasingResult r;
  r.method = Method::closed_form;
  r.term_resonant = prefactor * (c * c / d_plus + s * s / d_minus);
  r.term_zero_freq = 0.0;
  return finish(r);
}

DephasingResult sigma2_residue(const InterferometerParams& p, const NoiseParams& n) {
  n.validate();
  const SpectralPoint at_w0 = analytic_cross_spectrum(n, p.omega0);
  // Inertial spectra vanish like omega^4 at zero frequency.
  const SpectralPoint at_zero = analytic_cross_spectrum(n, 0.0);
  return sigma2_generic(p, {at_w0.sxx, at_w0.sxy.real(), at_zero.sxx, at_zero.sxy.real()});
}

namespace {

// S_aa + sin2t * co-spectrum continued off the real axis. On the real axis
// |z|^2 = z(w) conj(z(conj w)) for the polynomial factors involved.
Complex continued_spectrum(const NoiseParams& n, double sin2t, Complex w) {
  const Complex w2 = w * w;
  const Complex w4s0 = w2 * w2 * n.s0;
  const double om2 = n.apparatus_omega * n.apparatus_omega;
  const double g2 = n.gamma * n.gamma;
  if (n.is_coriolis()) {
    const double r = n.coriolis_rate();
    const Complex det2 =
        susceptibility_determinant(n, w) * std::conj(susceptibility_determinant(n, std::conj(w)));
    return w4s0 * ((om2 - w2) * (om2 - w2) + w2 * (g2 + 4.0 * r * r)) / det2;
  }
  const double k = n.direct_k();
  const Complex d_minus = (om2 - k - w2) * (om2 - k - w2) + w2 * g2;
  const Complex d_plus = (om2 + k - w2) * (om2 + k - w2) + w2 * g2;
  const Complex sxx = w4s0 * ((om2 - w2) * (om2 - w2) + w2 * g2 + k * k);
  const Complex sxy = w4s0 * 2.0 * k * (om2 - w2);
  return (sxx + sin2t * sxy) / (d_minus * d_plus);
}

// Zeros of det T; all lie in the upper half plane when gamma > 0.
std::vector<Complex> upper_poles(const NoiseParams& n) {
  std::vector<Complex> out;
  if (n.is_coriolis()) {
    const double om2 = n.apparatus_omega * n.apparatus_omega;
    for (double sign : {-1.0, 1.0}) {
      const Complex b(sign * 2.0 * n.coriolis_rate(), n.gamma);
      const Complex root = std::sqrt(b * b + 4.0 * om2);
      out.push_back(0.5 * (b + root));
      out.push_back(0.5 * (b - root));
    }
  } else {
    const PoleSet ps = poles(n);
    out.assign(ps.poles.begin(), ps.poles.end());
  }
  return out;
}

struct PoleCluster {
  Complex center;
  double spread = 0.0;
  std::vector<Complex> members;
};

// Groups poles that sit too close together to be circled one by one.
std::vector<PoleCluster> cluster_poles(std::vector<Complex> ps, double merge_distance) {
  std::vector<PoleCluster> clusters;
  for (const Complex& z : ps) {
    bool placed = false;
    for (auto& c : clusters) {
      if (std::abs(z - c.center) < merge_distance) {
        c.members.push_back(z);
        Complex sum{};
        for (const auto& m : c.members) sum += m;
        c.center = sum / static_cast<double>(c.members.size());
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({z, 0.0, {z}});
  }
  for (auto& c : clusters) {
    for (const auto& m : c.members) c.spread = std::max(c.spread, std::abs(m - c.center));
  }
  return clusters;
}

}  // namespace

DephasingResult sigma2_contour(const InterferometerParams& p, const NoiseParams& n) {
  p.validate();
  n.validate();
  if (!(n.gamma > 0.0)) {
    throw Error(ErrorCode::numerical, "contour route needs gamma > 0 (poles on the real axis)");
  }
  DephasingResult r = sigma2_residue(p, n);
  r.method = Method::contour;

  const double w0 = p.omega0;
  const double sin2t = std::sin(2.0 * p.theta);
  auto f = [&](Complex w) {
    const Complex phase = std::exp(Complex(0.0, 2.0 * kPi) * w / w0);
    const Complex w2 = w * w;
    return continued_spectrum(n, sin2t, w) * (1.0 - phase) / (w2 * (w2 - w0 * w0) * (w2 - w0 * w0));
  };

  const std::vector<Complex> ps = upper_poles(n);
  double min_im = std::numeric_limits<double>::infinity();
  for (const auto& z : ps) min_im = std::min(min_im, z.imag());
  const auto clusters = cluster_poles(ps, 0.25 * min_im);

  constexpr int kNodes = 256;
  Complex residue_sum{};
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const PoleCluster& c = clusters[i];
    // Keep clear of the real axis and of every other cluster.
    double clearance = c.center.imag();
    for (std::size_t j = 0; j < clusters.size(); ++j) {
      if (j == i) continue;
      for (const auto& m : clusters[j].members) {
        clearance = std::min(clearance, std::abs(m - c.center));
      }
    }
    const double radius = 0.5 * (c.spread + clearance);
    if (!(radius > c.spread)) {
      throw Error(ErrorCode::numerical, "contour route: poles too close to separate");
    }
    Complex sum{};
    for (int k = 0; k < kNodes; ++k) {
      const Complex e = std::polar(radius, 2.0 * kPi * k / kNodes);
      sum += f(c.center + e) * e;
    }
    residue_sum += sum / static_cast<double>(kNodes);
  }
  const Complex contribution = Complex(0.0, 2.0 * kPi) * residue_sum;
  r.term_spectral_poles = 4.0 * phase_scale(p) * 2.0 * std::pow(w0, 4) * contribution.real();
  return finish(r);
}

DephasingResult sigma2_quadrature(const InterferometerParams& p,
                                  const SpectrumFunction& spectra,
                                  const QuadratureOptions& opt) {
  p.validate();
  const double w0 = p.omega0;
  const double omega_max =
      opt.omega_max > 0.0 ? opt.omega_max : 200.0 * std::max(w0, opt.frequency_scale);
  const double sin2t = std::sin(2.0 * p.theta);

  auto integrand = [&](double w) {
    const auto [s, cospectrum] = spectra(w);
    return (s + sin2t * cospectrum) * transfer_f0(w, w0);
  };

  // Partition: zeros of F0 at integer multiples of omega0 (first 400), and
  // caller-supplied features.
  std::vector<double> breaks{0.0, omega_max};
  for (int m = 1; m <= 400 && m * w0 < omega_max; ++m) breaks.push_back(m * w0);
  for (double b : opt.breakpoints) {
    if (b > 0.0 && b < omega_max) breaks.push_back(b);
  }

  const double prefactor = 4.0 * phase_scale(p) * 2.0;  // even integrand
  const QuadratureResult q =
      integrate_adaptive(integrand, breaks, 0.5 * opt.rel_tol,
                         std::numeric_limits<double>::min(), opt.max_intervals);

  // Tail beyond omega_max: F0 <= 4 w0^4 / (w^2 (w^2 - w0^2)^2).
  double s_max = 0.0;
  for (double f : {1.0, 2.0, 10.0, 100.0}) {
    const auto [s, cospectrum] = spectra(f * omega_max);
    s_max = std::max(s_max, std::abs(s) + std::abs(sin2t * cospectrum));
  }
  const double ratio = w0 / omega_max;
  const double tail = s_max * 4.0 * std::pow(w0, 4) /
                      (5.0 * std::pow(omega_max, 5) * (1.0 - ratio * ratio) * (1.0 - ratio * ratio));

  DephasingResult r;
  r.method = Method::quadrature;
  // No resonant/zero-frequency split exists for the quadrature route; the
  // whole variance is reported as term_resonant.
  r.term_resonant = prefactor * q.value;
  r.term_zero_freq = 0.0;
  r.error_estimate = prefactor * (q.abs_error + tail);
  r = finish(r);
  if (!(r.error_estimate <= opt.rel_tol * std::abs(r.sigma2))) {
    throw QuadratureError("quadrature did not converge: achieved error bound " +
                              std::to_string(r.error_estimate) + " for sigma2 " +
                              std::to_string(r.sigma2),
                          r.error_estimate);
  }
  return r;
}

DephasingResult sigma2_quadrature(const InterferometerParams& p, const NoiseParams& n,
                                  double rel_tol) {
  n.validate();
  QuadratureOptions opt;
  opt.rel_tol = rel_tol;
  opt.frequency_scale = n.apparatus_omega;
  if (n.is_coriolis()) {
    const double r = std::abs(n.coriolis_rate());
    const double base = std::sqrt(r * r + n.apparatus_omega * n.apparatus_omega);
    for (double f : {base - r, base + r}) opt.breakpoints.push_back(f);
  } else {
    for (const Complex& pole : poles(n).poles) {
      if (pole.real() > 0.0) opt.breakpoints.push_back(pole.real());
    }
  }
  // Bracket each peak on the scale of its width.
  const std::vector<double> centers = opt.breakpoints;
  for (double c : centers) {
    for (double width : {0.5, 2.0, 8.0, 32.0}) {
      opt.breakpoints.push_back(c - width * n.gamma);
      opt.breakpoints.push_back(c + width * n.gamma);
    }
  }
  auto spectra = [&n](double w) {
    const SpectralPoint s = analytic_cross_spectrum(n, w);
    return std::pair{s.sxx, s.sxy.real()};
  };
  return sigma2_quadrature(p, spectra, opt);
}

SnrResult snr(const InterferometerParams& p, const NoiseParams& n, double g) {
  const DephasingResult d = sigma2_closed(p, n);
  SnrResult r;
  r.signal_phase = signal_phase(p, g);
  r.sigma = std::sqrt(d.sigma2);
  if (r.sigma == 0.0) throw Error(ErrorCode::numerical, "noiseless SNR undefined");
  r.snr = r.signal_phase / r.sigma;
  return r;
}

OptimumResult optimize(const InterferometerParams& p, const NoiseParams& n,
                       OptimizeVariable vary, Bounds bounds) {
  p.validate();
  n.validate();
  if (!std::isfinite(bounds.lo) || !std::isfinite(bounds.hi) || !(bounds.lo < bounds.hi)) {
    throw Error(ErrorCode::invalid_argument, "optimize: bounds must satisfy lo < hi");
  }
  const double om2 = n.apparatus_omega * n.apparatus_omega;
  if (vary == OptimizeVariable::k) {
    if (n.is_coriolis()) {
      throw Error(ErrorCode::wrong_variant, "optimize: k requires the direct-coupling model");
    }
    if (std::abs(bounds.lo) >= om2 || std::abs(bounds.hi) >= om2) {
      throw Error(ErrorCode::invalid_argument, "optimize: k bounds must satisfy |k| < Omega0^2");
    }
  }
  if (vary == OptimizeVariable::gamma && bounds.lo < 0.0) {
    throw Error(ErrorCode::invalid_argument, "optimize: gamma bounds must be >= 0");
  }

  auto objective = [&](double x) {
    InterferometerParams pp = p;
    NoiseParams nn = n;
    switch (vary) {
      case OptimizeVariable::theta: pp.theta = x; break;
      case OptimizeVariable::k: nn.coupling = DirectCoupling{x}; break;
      case OptimizeVariable::gamma: nn.gamma = x; break;
    }
    try {
      return sigma2_closed(pp, nn).sigma2;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::numerical) throw;
      return std::numeric_limits<double>::infinity();
    }
  };

  constexpr std::size_t kScan = 257;
  std::vector<double> xs(kScan);
  std::vector<double> fs(kScan);
  for (std::size_t i = 0; i < kScan; ++i) {
    xs[i] = bounds.lo + (bounds.hi - bounds.lo) * static_cast<double>(i) / (kScan - 1);
    fs[i] = objective(xs[i]);
  }
  const auto [min_it, max_it] = std::minmax_element(fs.begin(), fs.end());
  const std::size_t best = static_cast<std::size_t>(min_it - fs.begin());

  OptimumResult out;
  if (*max_it - *min_it <= 1e-12 * std::abs(*max_it)) {
    out.argmin = xs[best];
    out.min_sigma2 = *min_it;
    out.flat_objective = true;
    return out;
  }

  // Golden-section refinement inside the bracketing scan cell.
  double a = xs[best == 0 ? 0 : best - 1];
  double b = xs[best + 1 == kScan ? kScan - 1 : best + 1];
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int iter = 0; iter < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(a) + std::abs(b));
       ++iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  out.argmin = 0.5 * (a + b);
  out.min_sigma2 = objective(out.argmin);
  // A minimum on the boundary is only reached in the limit; keep the endpoint.
  if (fs[best] < out.min_sigma2) {
    out.argmin = xs[best];
    out.min_sigma2 = fs[best];
  }
  return out;
}

}  // namespace qdephase
