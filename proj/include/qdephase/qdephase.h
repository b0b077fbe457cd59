/* C interface to the qdephase library.
 *
 * Every fallible call returns a qdp_status; on failure qdp_last_error()
 * holds a message for the calling thread until its next failing call.
 * Frequencies are angular [rad/s]. Spectra are two-sided with
 * E[a_i(t) a_j(t+tau)] = int S_ij(w) e^{-i w tau} dw.
 */
#ifndef QDEPHASE_H
#define QDEPHASE_H

#include <stddef.h>
#include <stdint.h>

#if defined(QDP_BUILDING_LIBRARY)
#define QDP_API __attribute__((visibility("default")))
#else
#define QDP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qdp_status {
  QDP_OK = 0,
  QDP_ERR_INVALID_ARGUMENT = 1,
  QDP_ERR_WRONG_VARIANT = 2,
  QDP_ERR_NUMERICAL = 3,
  QDP_ERR_IO = 4,
  QDP_ERR_INTERNAL = 5
} qdp_status;

QDP_API const char* qdp_last_error(void);
QDP_API const char* qdp_version(void);
QDP_API const char* qdp_spectral_convention(void);

typedef struct qdp_interferometer {
  double mass;
  double omega0;
  double coupling;
  double theta;
  double hbar;
} qdp_interferometer;

/* m = hbar = 1, coupling such that the arm amplitude equals a0. */
QDP_API qdp_status qdp_interferometer_normalized(double omega0, double a0, double theta,
                                                 qdp_interferometer* out);
QDP_API qdp_status qdp_interferometer_amplitude(const qdp_interferometer* p, double* out);

typedef enum qdp_coupling {
  QDP_UNCOUPLED = 0,
  QDP_DIRECT = 1,
  QDP_CORIOLIS = 2
} qdp_coupling;

typedef struct qdp_noise {
  double apparatus_omega;
  double gamma;
  double s0;
  qdp_coupling coupling;
  double k;             /* QDP_DIRECT only */
  double coriolis_rate; /* QDP_CORIOLIS only */
} qdp_noise;

typedef struct qdp_sim_config {
  double dt;
  uint64_t n_steps;
  uint64_t burn_in;
  uint64_t seed;
  int record_noise;
} qdp_sim_config;

typedef enum qdp_window { QDP_WINDOW_HANN = 0, QDP_WINDOW_RECTANGULAR = 1 } qdp_window;

typedef struct qdp_welch_config {
  uint32_t n_segments;
  double overlap;
  qdp_window window;
} qdp_welch_config;

/* Defaults: dt 0.05, 10 Hann segments at 50% overlap. */
QDP_API void qdp_sim_config_default(qdp_sim_config* out);
QDP_API void qdp_welch_config_default(qdp_welch_config* out);
/* Ten damping times, capped at n_steps / 2. */
QDP_API uint64_t qdp_default_burn_in(const qdp_noise* n, double dt, uint64_t n_steps);
QDP_API qdp_status qdp_validate_interferometer(const qdp_interferometer* p);
/* Includes the dt stability guard against the fastest apparatus mode. */
QDP_API qdp_status qdp_validate_sim(const qdp_noise* n, const qdp_sim_config* c);
QDP_API qdp_status qdp_validate_welch(const qdp_welch_config* c);

/* ---- interferometer ---- */

QDP_API qdp_status qdp_transfer_f0(double omega, double omega0, double* out);
QDP_API qdp_status qdp_differential_trajectory(const qdp_interferometer* p, double t,
                                               double* dx, double* dy);
QDP_API qdp_status qdp_signal_phase(const qdp_interferometer* p, double g, double* out);

/* ---- noise model ---- */

QDP_API qdp_status qdp_validate_noise(const qdp_noise* n);
QDP_API qdp_status qdp_analytic_spectrum(const qdp_noise* n, double omega, double* sxx,
                                         double* syy, double* re_sxy, double* im_sxy);
/* Order: the two Omega0^2 - k roots, then the two Omega0^2 + k roots. */
QDP_API qdp_status qdp_poles(const qdp_noise* n, double re[4], double im[4]);
/* Analytic peak frequencies and Q factors (Q is NaN when gamma == 0). At most
 * `capacity` entries are written; *count receives the number found. */
QDP_API qdp_status qdp_peaks(const qdp_noise* n, double* freq, double* q, size_t capacity,
                             size_t* count);
QDP_API qdp_status qdp_analytic_spectrum_write_csv(const qdp_noise* n, double omega0,
                                                   const double* grid, size_t len,
                                                   const char* path, const char* header);

/* ---- dephasing ---- */

typedef enum qdp_method {
  QDP_METHOD_CLOSED_FORM = 0,
  QDP_METHOD_QUADRATURE = 1,
  QDP_METHOD_MONTE_CARLO = 2,
  QDP_METHOD_CONTOUR = 3
} qdp_method;

typedef struct qdp_dephasing {
  double sigma2;
  double term_resonant;
  double term_zero_freq;
  double term_spectral_poles;
  double dephasing_factor;
  double error_estimate;
  qdp_method method;
} qdp_dephasing;

QDP_API qdp_status qdp_sigma2_closed(const qdp_interferometer* p, const qdp_noise* n,
                                     qdp_dephasing* out);
QDP_API qdp_status qdp_sigma2_residue(const qdp_interferometer* p, const qdp_noise* n,
                                      qdp_dephasing* out);
/* Residue sum including the spectral poles off the real axis (gamma > 0). */
QDP_API qdp_status qdp_sigma2_contour(const qdp_interferometer* p, const qdp_noise* n,
                                      qdp_dephasing* out);
QDP_API qdp_status qdp_sigma2_generic(const qdp_interferometer* p, double s_omega0,
                                      double cospectrum_omega0, double s_zero,
                                      double cospectrum_zero, qdp_dephasing* out);
QDP_API qdp_status qdp_sigma2_quadrature(const qdp_interferometer* p, const qdp_noise* n,
                                         double rel_tol, qdp_dephasing* out);

/* User spectrum for quadrature: write S_aa(omega) and the co-spectrum, return
 * nonzero to abort. Must be even in omega. */
typedef int (*qdp_spectrum_fn)(double omega, void* user, double* s, double* cospectrum);
QDP_API qdp_status qdp_sigma2_quadrature_fn(const qdp_interferometer* p, qdp_spectrum_fn fn,
                                            void* user, double frequency_scale,
                                            double rel_tol, qdp_dephasing* out);

QDP_API qdp_status qdp_snr(const qdp_interferometer* p, const qdp_noise* n, double g,
                           double* signal_phase, double* sigma, double* snr);

typedef enum qdp_variable { QDP_VARY_THETA = 0, QDP_VARY_K = 1, QDP_VARY_GAMMA = 2 } qdp_variable;

QDP_API qdp_status qdp_optimize(const qdp_interferometer* p, const qdp_noise* n,
                                qdp_variable vary, double lo, double hi, double* argmin,
                                double* min_sigma2, int* flat_objective);

/* ---- Langevin simulation ---- */

typedef struct qdp_trajectory qdp_trajectory;

typedef enum qdp_column {
  QDP_COL_T = 0,
  QDP_COL_X,
  QDP_COL_Y,
  QDP_COL_VX,
  QDP_COL_VY,
  QDP_COL_AX,
  QDP_COL_AY,
  QDP_COL_NOISE_X,
  QDP_COL_NOISE_Y
} qdp_column;

QDP_API qdp_status qdp_simulate(const qdp_noise* n, const qdp_sim_config* c,
                                qdp_trajectory** out);
QDP_API qdp_status qdp_trajectory_read_csv(const char* path, qdp_trajectory** out);
/* path NULL or "-" writes to stdout. */
QDP_API qdp_status qdp_trajectory_write_csv(const qdp_trajectory* t, const char* path,
                                            const char* header);
QDP_API size_t qdp_trajectory_size(const qdp_trajectory* t);
QDP_API int qdp_trajectory_has_noise(const qdp_trajectory* t);
/* NULL for an absent noise column. Valid until qdp_trajectory_free. */
QDP_API const double* qdp_trajectory_column(const qdp_trajectory* t, qdp_column col);
QDP_API void qdp_trajectory_free(qdp_trajectory* t);

/* ---- spectral estimation ---- */

typedef struct qdp_spectrum qdp_spectrum;

QDP_API qdp_status qdp_cross_psd(const double* x, const double* y, size_t len, double dt,
                                 const qdp_welch_config* cfg, qdp_spectrum** out);
/* Welch spectra of the inertial noise -d^2X/dt^2, -d^2Y/dt^2. */
QDP_API qdp_status qdp_estimate_noise_spectra(const qdp_trajectory* t, double dt,
                                              const qdp_welch_config* cfg,
                                              qdp_spectrum** out);
QDP_API size_t qdp_spectrum_size(const qdp_spectrum* s);
QDP_API qdp_status qdp_spectrum_bin(const qdp_spectrum* s, size_t i, double* omega,
                                    double* sxx, double* syy, double* re_sxy, double* im_sxy);
QDP_API qdp_status qdp_spectrum_stderr(const qdp_spectrum* s, size_t i, double* re_se,
                                       double* im_se);
QDP_API size_t qdp_spectrum_averages(const qdp_spectrum* s);
QDP_API size_t qdp_spectrum_segment_length(const qdp_spectrum* s);
QDP_API double qdp_spectrum_integrated_power_x(const qdp_spectrum* s);
QDP_API qdp_status qdp_spectrum_write_csv(const qdp_spectrum* s, const char* path,
                                          const char* header);
QDP_API void qdp_spectrum_free(qdp_spectrum* s);

/* ---- Monte Carlo ---- */

typedef struct qdp_mc_summary {
  size_t n;
  double mean;
  double variance;
  double variance_std_error;
  double re_dephasing;
  double im_dephasing;
  double dephasing_std_error;
  double excess_kurtosis;
  int dephasing_unresolved;
} qdp_mc_summary;

QDP_API qdp_status qdp_accumulate_phase(const double* dax, const double* day, size_t len,
                                        double dt, const qdp_interferometer* p, double* out);
/* n_steps == 0 selects burn-in plus two trap periods. `phases` may be NULL,
 * otherwise it receives `realizations` values. threads == 0 uses all cores. */
QDP_API qdp_status qdp_mc_sigma2(const qdp_interferometer* p, const qdp_noise* n,
                                 const qdp_sim_config* c, size_t realizations,
                                 unsigned threads, qdp_mc_summary* out, double* phases);

#ifdef __cplusplus
}
#endif

#endif /* QDEPHASE_H */
