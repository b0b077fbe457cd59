#include "qdephase/qdephase.h"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "qdephase/dephasing.hpp"
#include "qdephase/error.hpp"
#include "qdephase/interferometer.hpp"
#include "qdephase/io.hpp"
#include "qdephase/langevin.hpp"
#include "qdephase/noise_model.hpp"
#include "qdephase/phase_mc.hpp"
#include "qdephase/spectral.hpp"

#ifndef QDEPHASE_VERSION
#define QDEPHASE_VERSION "0.0.0"
#endif

struct qdp_trajectory {
  qdephase::TrajectoryRecord rec;
};

struct qdp_spectrum {
  qdephase::EstimatedSpectrum est;
};

namespace {

using namespace qdephase;

thread_local std::string g_last_error;

qdp_status fail(qdp_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
qdp_status guard(F&& f) {
  try {
    f();
    return QDP_OK;
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::invalid_argument: return fail(QDP_ERR_INVALID_ARGUMENT, e.what());
      case ErrorCode::wrong_variant: return fail(QDP_ERR_WRONG_VARIANT, e.what());
      case ErrorCode::numerical: return fail(QDP_ERR_NUMERICAL, e.what());
      case ErrorCode::io: return fail(QDP_ERR_IO, e.what());
    }
    return fail(QDP_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(QDP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QDP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QDP_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* ptr, const char* name) {
  if (ptr == nullptr) {
    throw Error(ErrorCode::invalid_argument, std::string(name) + ": null pointer");
  }
}

InterferometerParams to_cpp(const qdp_interferometer* p) {
  require(p, "interferometer");
  return {p->mass, p->omega0, p->coupling, p->theta, p->hbar};
}

NoiseParams to_cpp(const qdp_noise* n) {
  require(n, "noise");
  NoiseParams out;
  out.apparatus_omega = n->apparatus_omega;
  out.gamma = n->gamma;
  out.s0 = n->s0;
  switch (n->coupling) {
    case QDP_UNCOUPLED: out.coupling = Uncoupled{}; break;
    case QDP_DIRECT: out.coupling = DirectCoupling{n->k}; break;
    case QDP_CORIOLIS: out.coupling = Coriolis{n->coriolis_rate}; break;
    default: throw Error(ErrorCode::invalid_argument, "noise.variant: unknown coupling variant");
  }
  return out;
}

SimConfig to_cpp(const qdp_sim_config* c) {
  require(c, "sim");
  SimConfig out;
  out.dt = c->dt;
  out.n_steps = c->n_steps;
  out.burn_in = c->burn_in;
  out.seed = c->seed;
  out.record_noise = c->record_noise != 0;
  return out;
}

WelchConfig to_cpp(const qdp_welch_config* c) {
  require(c, "welch");
  WelchConfig out;
  out.n_segments = c->n_segments;
  out.overlap = c->overlap;
  switch (c->window) {
    case QDP_WINDOW_HANN: out.window = Window::hann; break;
    case QDP_WINDOW_RECTANGULAR: out.window = Window::rectangular; break;
    default: throw Error(ErrorCode::invalid_argument, "welch.window: unknown window");
  }
  return out;
}

void store(const DephasingResult& r, qdp_dephasing* out) {
  out->sigma2 = r.sigma2;
  out->term_resonant = r.term_resonant;
  out->term_zero_freq = r.term_zero_freq;
  out->term_spectral_poles = r.term_spectral_poles;
  out->dephasing_factor = r.dephasing_factor;
  out->error_estimate = r.error_estimate;
  switch (r.method) {
    case Method::closed_form: out->method = QDP_METHOD_CLOSED_FORM; break;
    case Method::contour: out->method = QDP_METHOD_CONTOUR; break;
    case Method::quadrature: out->method = QDP_METHOD_QUADRATURE; break;
    case Method::monte_carlo: out->method = QDP_METHOD_MONTE_CARLO; break;
  }
}

template <class Writer>
void write_to(const char* path, Writer&& w) {
  if (path == nullptr || std::string_view(path) == "-") {
    w(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::io, std::string("cannot open '") + path + "' for writing");
  w(os);
  os.close();
  if (!os) throw Error(ErrorCode::io, std::string("failed writing '") + path + "'");
}

const char* header_or_empty(const char* h) { return h == nullptr ? "" : h; }

}  // namespace

extern "C" {

const char* qdp_last_error(void) { return g_last_error.c_str(); }
const char* qdp_version(void) { return QDEPHASE_VERSION; }
const char* qdp_spectral_convention(void) { return kSpectralConvention.data(); }

qdp_status qdp_interferometer_normalized(double omega0, double a0, double theta,
                                         qdp_interferometer* out) {
  return guard([&] {
    require(out, "out");
    const auto p = InterferometerParams::normalized(omega0, a0, theta);
    *out = {p.mass, p.omega0, p.coupling, p.theta, p.hbar};
  });
}

qdp_status qdp_interferometer_amplitude(const qdp_interferometer* p, double* out) {
  return guard([&] {
    require(out, "out");
    const auto q = to_cpp(p);
    q.validate();
    *out = q.amplitude();
  });
}

void qdp_sim_config_default(qdp_sim_config* out) {
  if (out == nullptr) return;
  const SimConfig c;
  *out = {c.dt, c.n_steps, c.burn_in, c.seed, c.record_noise ? 1 : 0};
}

void qdp_welch_config_default(qdp_welch_config* out) {
  if (out == nullptr) return;
  const WelchConfig c;
  *out = {static_cast<uint32_t>(c.n_segments), c.overlap,
          c.window == Window::hann ? QDP_WINDOW_HANN : QDP_WINDOW_RECTANGULAR};
}

uint64_t qdp_default_burn_in(const qdp_noise* n, double dt, uint64_t n_steps) {
  uint64_t out = 0;
  guard([&] { out = SimConfig::default_burn_in(to_cpp(n), dt, n_steps); });
  return out;
}

qdp_status qdp_validate_interferometer(const qdp_interferometer* p) {
  return guard([&] { to_cpp(p).validate(); });
}

qdp_status qdp_validate_sim(const qdp_noise* n, const qdp_sim_config* c) {
  return guard([&] {
    const NoiseParams np = to_cpp(n);
    np.validate();
    to_cpp(c).validate(np);
  });
}

qdp_status qdp_validate_welch(const qdp_welch_config* c) {
  return guard([&] { to_cpp(c).validate(); });
}

qdp_status qdp_transfer_f0(double omega, double omega0, double* out) {
  return guard([&] {
    require(out, "out");
    *out = transfer_f0(omega, omega0);
  });
}

qdp_status qdp_differential_trajectory(const qdp_interferometer* p, double t, double* dx,
                                       double* dy) {
  return guard([&] {
    require(dx, "dx");
    require(dy, "dy");
    const auto d = differential_trajectory(to_cpp(p), t);
    *dx = d.dx;
    *dy = d.dy;
  });
}

qdp_status qdp_signal_phase(const qdp_interferometer* p, double g, double* out) {
  return guard([&] {
    require(out, "out");
    *out = signal_phase(to_cpp(p), g);
  });
}

qdp_status qdp_validate_noise(const qdp_noise* n) {
  return guard([&] { to_cpp(n).validate(); });
}

qdp_status qdp_analytic_spectrum(const qdp_noise* n, double omega, double* sxx, double* syy,
                                 double* re_sxy, double* im_sxy) {
  return guard([&] {
    const auto s = analytic_cross_spectrum(to_cpp(n), omega);
    if (sxx) *sxx = s.sxx;
    if (syy) *syy = s.syy;
    if (re_sxy) *re_sxy = s.sxy.real();
    if (im_sxy) *im_sxy = s.sxy.imag();
  });
}

qdp_status qdp_poles(const qdp_noise* n, double re[4], double im[4]) {
  return guard([&] {
    require(re, "re");
    require(im, "im");
    const auto ps = poles(to_cpp(n));
    for (int i = 0; i < 4; ++i) {
      re[i] = ps.poles[i].real();
      im[i] = ps.poles[i].imag();
    }
  });
}

qdp_status qdp_peaks(const qdp_noise* n, double* freq, double* q, size_t capacity,
                     size_t* count) {
  return guard([&] {
    require(count, "count");
    const NoiseParams np = to_cpp(n);
    const auto report = peaks_and_q(np, default_peak_grid(np));
    const auto& info = report.analytic;
    *count = info.peak_frequencies.size();
    for (size_t i = 0; i < info.peak_frequencies.size() && i < capacity; ++i) {
      if (freq) freq[i] = info.peak_frequencies[i];
      if (q) q[i] = info.q_factors[i].value_or(std::numeric_limits<double>::quiet_NaN());
    }
  });
}

qdp_status qdp_analytic_spectrum_write_csv(const qdp_noise* n, double omega0, const double* grid,
                                           size_t len, const char* path, const char* header) {
  return guard([&] {
    if (len > 0) require(grid, "grid");
    const auto csm = analytic_cross_spectra(to_cpp(n), std::span<const double>(grid, len));
    write_to(path, [&](std::ostream& os) {
      write_analytic_spectrum_csv(os, csm, omega0, header_or_empty(header));
    });
  });
}

qdp_status qdp_sigma2_closed(const qdp_interferometer* p, const qdp_noise* n,
                             qdp_dephasing* out) {
  return guard([&] {
    require(out, "out");
    store(sigma2_closed(to_cpp(p), to_cpp(n)), out);
  });
}

qdp_status qdp_sigma2_residue(const qdp_interferometer* p, const qdp_noise* n,
                              qdp_dephasing* out) {
  return guard([&] {
    require(out, "out");
    store(sigma2_residue(to_cpp(p), to_cpp(n)), out);
  });
}

qdp_status qdp_sigma2_contour(const qdp_interferometer* p, const qdp_noise* n,
                              qdp_dephasing* out) {
  return guard([&] {
    require(out, "out");
    store(sigma2_contour(to_cpp(p), to_cpp(n)), out);
  });
}

qdp_status qdp_sigma2_generic(const qdp_interferometer* p, double s_omega0,
                              double cospectrum_omega0, double s_zero, double cospectrum_zero,
                              qdp_dephasing* out) {
  return guard([&] {
    require(out, "out");
    store(sigma2_generic(to_cpp(p), {s_omega0, cospectrum_omega0, s_zero, cospectrum_zero}), out);
  });
}

qdp_status qdp_sigma2_quadrature(const qdp_interferometer* p, const qdp_noise* n, double rel_tol,
                                 qdp_dephasing* out) {
  return guard([&] {
    require(out, "out");
    store(sigma2_quadrature(to_cpp(p), to_cpp(n), rel_tol), out);
  });
}

qdp_status qdp_sigma2_quadrature_fn(const qdp_interferometer* p, qdp_spectrum_fn fn, void* user,
                                    double frequency_scale, double rel_tol, qdp_dephasing* out) {
  return guard([&] {
    require(out, "out");
    if (fn == nullptr) throw Error(ErrorCode::invalid_argument, "spectrum callback: null");
    QuadratureOptions opt;
    opt.rel_tol = rel_tol;
    opt.frequency_scale = frequency_scale;
    SpectrumFunction f = [&](double omega) {
      double s = 0.0, c = 0.0;
      if (fn(omega, user, &s, &c) != 0) {
        throw Error(ErrorCode::numerical, "spectrum callback aborted");
      }
      return std::pair{s, c};
    };
    store(sigma2_quadrature(to_cpp(p), f, opt), out);
  });
}

qdp_status qdp_snr(const qdp_interferometer* p, const qdp_noise* n, double g,
                   double* signal_phase_out, double* sigma, double* snr_out) {
  return guard([&] {
    const auto r = snr(to_cpp(p), to_cpp(n), g);
    if (signal_phase_out) *signal_phase_out = r.signal_phase;
    if (sigma) *sigma = r.sigma;
    if (snr_out) *snr_out = r.snr;
  });
}

qdp_status qdp_optimize(const qdp_interferometer* p, const qdp_noise* n, qdp_variable vary,
                        double lo, double hi, double* argmin, double* min_sigma2,
                        int* flat_objective) {
  return guard([&] {
    OptimizeVariable v{};
    switch (vary) {
      case QDP_VARY_THETA: v = OptimizeVariable::theta; break;
      case QDP_VARY_K: v = OptimizeVariable::k; break;
      case QDP_VARY_GAMMA: v = OptimizeVariable::gamma; break;
      default: throw Error(ErrorCode::invalid_argument, "optimize.vary: unknown variable");
    }
    const auto r = optimize(to_cpp(p), to_cpp(n), v, {lo, hi});
    if (argmin) *argmin = r.argmin;
    if (min_sigma2) *min_sigma2 = r.min_sigma2;
    if (flat_objective) *flat_objective = r.flat_objective ? 1 : 0;
  });
}

qdp_status qdp_simulate(const qdp_noise* n, const qdp_sim_config* c, qdp_trajectory** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    auto t = std::make_unique<qdp_trajectory>();
    t->rec = simulate(to_cpp(n), to_cpp(c));
    *out = t.release();
  });
}

qdp_status qdp_trajectory_read_csv(const char* path, qdp_trajectory** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    std::ifstream is(path);
    if (!is) throw Error(ErrorCode::io, std::string("cannot open '") + path + "'");
    auto t = std::make_unique<qdp_trajectory>();
    t->rec = read_trajectory_csv(is);
    *out = t.release();
  });
}

qdp_status qdp_trajectory_write_csv(const qdp_trajectory* t, const char* path,
                                    const char* header) {
  return guard([&] {
    require(t, "trajectory");
    write_to(path, [&](std::ostream& os) {
      write_trajectory_csv(os, t->rec, header_or_empty(header));
    });
  });
}

size_t qdp_trajectory_size(const qdp_trajectory* t) { return t ? t->rec.size() : 0; }

int qdp_trajectory_has_noise(const qdp_trajectory* t) {
  return t && t->rec.has_noise() ? 1 : 0;
}

const double* qdp_trajectory_column(const qdp_trajectory* t, qdp_column col) {
  if (t == nullptr) return nullptr;
  const auto& r = t->rec;
  const std::vector<double>* v = nullptr;
  switch (col) {
    case QDP_COL_T: v = &r.t; break;
    case QDP_COL_X: v = &r.x; break;
    case QDP_COL_Y: v = &r.y; break;
    case QDP_COL_VX: v = &r.vx; break;
    case QDP_COL_VY: v = &r.vy; break;
    case QDP_COL_AX: v = &r.ax; break;
    case QDP_COL_AY: v = &r.ay; break;
    case QDP_COL_NOISE_X: v = &r.noise_x; break;
    case QDP_COL_NOISE_Y: v = &r.noise_y; break;
  }
  if (v == nullptr || v->empty()) return nullptr;
  return v->data();
}

void qdp_trajectory_free(qdp_trajectory* t) { delete t; }

qdp_status qdp_cross_psd(const double* x, const double* y, size_t len, double dt,
                         const qdp_welch_config* cfg, qdp_spectrum** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    if (len > 0) {
      require(x, "x");
      require(y, "y");
    }
    auto s = std::make_unique<qdp_spectrum>();
    s->est = cross_psd_welch({x, len}, {y, len}, dt, to_cpp(cfg));
    *out = s.release();
  });
}

qdp_status qdp_estimate_noise_spectra(const qdp_trajectory* t, double dt,
                                      const qdp_welch_config* cfg, qdp_spectrum** out) {
  return guard([&] {
    require(t, "trajectory");
    require(out, "out");
    *out = nullptr;
    auto s = std::make_unique<qdp_spectrum>();
    s->est = estimate_noise_spectra(t->rec, dt, to_cpp(cfg));
    *out = s.release();
  });
}

size_t qdp_spectrum_size(const qdp_spectrum* s) { return s ? s->est.size() : 0; }

qdp_status qdp_spectrum_bin(const qdp_spectrum* s, size_t i, double* omega, double* sxx,
                            double* syy, double* re_sxy, double* im_sxy) {
  return guard([&] {
    require(s, "spectrum");
    if (i >= s->est.size()) throw Error(ErrorCode::invalid_argument, "spectrum bin out of range");
    if (omega) *omega = s->est.omega[i];
    if (sxx) *sxx = s->est.sxx[i];
    if (syy) *syy = s->est.syy[i];
    if (re_sxy) *re_sxy = s->est.sxy[i].real();
    if (im_sxy) *im_sxy = s->est.sxy[i].imag();
  });
}

qdp_status qdp_spectrum_stderr(const qdp_spectrum* s, size_t i, double* re_se, double* im_se) {
  return guard([&] {
    require(s, "spectrum");
    if (i >= s->est.size()) throw Error(ErrorCode::invalid_argument, "spectrum bin out of range");
    if (re_se) *re_se = s->est.sxy_re_stderr[i];
    if (im_se) *im_se = s->est.sxy_im_stderr[i];
  });
}

size_t qdp_spectrum_averages(const qdp_spectrum* s) { return s ? s->est.n_averages : 0; }
size_t qdp_spectrum_segment_length(const qdp_spectrum* s) {
  return s ? s->est.segment_length : 0;
}
double qdp_spectrum_integrated_power_x(const qdp_spectrum* s) {
  return s ? s->est.integrated_power_x() : std::numeric_limits<double>::quiet_NaN();
}

qdp_status qdp_spectrum_write_csv(const qdp_spectrum* s, const char* path, const char* header) {
  return guard([&] {
    require(s, "spectrum");
    write_to(path,
             [&](std::ostream& os) { write_spectrum_csv(os, s->est, header_or_empty(header)); });
  });
}

void qdp_spectrum_free(qdp_spectrum* s) { delete s; }

qdp_status qdp_accumulate_phase(const double* dax, const double* day, size_t len, double dt,
                                const qdp_interferometer* p, double* out) {
  return guard([&] {
    require(out, "out");
    if (len > 0) {
      require(dax, "dax");
      require(day, "day");
    }
    *out = accumulate_phase({dax, len}, {day, len}, dt, to_cpp(p)).delta_phi;
  });
}

qdp_status qdp_mc_sigma2(const qdp_interferometer* p, const qdp_noise* n, const qdp_sim_config* c,
                         size_t realizations, unsigned threads, qdp_mc_summary* out,
                         double* phases) {
  return guard([&] {
    require(out, "out");
    const auto r = mc_sigma2(to_cpp(p), to_cpp(n), to_cpp(c), realizations, threads);
    out->n = r.n;
    out->mean = r.mean;
    out->variance = r.variance;
    out->variance_std_error = r.variance_std_error;
    out->re_dephasing = r.dephasing_factor.real();
    out->im_dephasing = r.dephasing_factor.imag();
    out->dephasing_std_error = r.dephasing_std_error;
    out->excess_kurtosis = r.excess_kurtosis;
    out->dephasing_unresolved = r.dephasing_unresolved ? 1 : 0;
    if (phases) {
      for (size_t i = 0; i < r.samples.size(); ++i) phases[i] = r.samples[i].delta_phi;
    }
  });
}

}  // extern "C"
