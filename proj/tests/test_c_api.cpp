#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "doctest.h"
#include "qdephase/qdephase.h"

using std::numbers::pi;

namespace {

qdp_noise direct(double k, double gamma) {
  return {1.0, gamma, 1.0, QDP_DIRECT, k, 0.0};
}

qdp_interferometer unit(double omega0 = 1.0, double theta = 0.0) {
  qdp_interferometer p{};
  REQUIRE(qdp_interferometer_normalized(omega0, 1.0, theta, &p) == QDP_OK);
  return p;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("C API: version and convention") {
  CHECK(std::strlen(qdp_version()) > 0);
  CHECK(std::string(qdp_spectral_convention()).find("two-sided") != std::string::npos);
}

TEST_CASE("C API: status codes and last error") {
  qdp_noise bad = direct(1.5, 0.1);
  CHECK(qdp_validate_noise(&bad) == QDP_ERR_INVALID_ARGUMENT);
  CHECK(std::string(qdp_last_error()).rfind("noise.k:", 0) == 0);

  qdp_noise cor{1.0, 0.1, 1.0, QDP_CORIOLIS, 0.0, 0.3};
  const auto p = unit();
  qdp_dephasing d{};
  CHECK(qdp_sigma2_closed(&p, &cor, &d) == QDP_ERR_WRONG_VARIANT);
  CHECK(std::string(qdp_last_error()) == "normal modes defined only for direct coupling");

  qdp_noise quiet = direct(0.0, 0.1);
  quiet.s0 = 0.0;
  double sp, sg, snr;
  CHECK(qdp_snr(&p, &quiet, 9.81, &sp, &sg, &snr) == QDP_ERR_NUMERICAL);
  CHECK(std::string(qdp_last_error()) == "noiseless SNR undefined");

  qdp_trajectory* t = nullptr;
  CHECK(qdp_trajectory_read_csv("/nonexistent/dir/x.csv", &t) == QDP_ERR_IO);
  CHECK(t == nullptr);

  CHECK(qdp_sigma2_closed(nullptr, &cor, &d) == QDP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("C API: dephasing routes") {
  const auto p = unit();
  const auto n = direct(0.0, 0.1);
  qdp_dephasing closed{}, quad{}, contour{}, residue{};
  REQUIRE(qdp_sigma2_closed(&p, &n, &closed) == QDP_OK);
  REQUIRE(qdp_sigma2_residue(&p, &n, &residue) == QDP_OK);
  REQUIRE(qdp_sigma2_quadrature(&p, &n, 1e-10, &quad) == QDP_OK);
  REQUIRE(qdp_sigma2_contour(&p, &n, &contour) == QDP_OK);
  CHECK(closed.sigma2 == doctest::Approx(800 * pi * pi).epsilon(1e-13));
  CHECK(closed.method == QDP_METHOD_CLOSED_FORM);
  CHECK(quad.method == QDP_METHOD_QUADRATURE);
  CHECK(contour.method == QDP_METHOD_CONTOUR);
  CHECK(residue.sigma2 == doctest::Approx(closed.sigma2).epsilon(1e-12));
  CHECK(contour.sigma2 == doctest::Approx(quad.sigma2).epsilon(1e-9));

  qdp_dephasing g{};
  REQUIRE(qdp_sigma2_generic(&p, 1.0, 0.0, 1.0, 0.0, &g) == QDP_OK);
  CHECK(g.sigma2 == doctest::Approx(24 * pi * pi));

  auto flat = [](double, void*, double* s, double* c) {
    *s = 1.0;
    *c = 0.0;
    return 0;
  };
  qdp_dephasing f{};
  REQUIRE(qdp_sigma2_quadrature_fn(&p, flat, nullptr, 1.0, 1e-10, &f) == QDP_OK);
  CHECK(f.sigma2 == doctest::Approx(24 * pi * pi).epsilon(1e-8));
  auto abort_fn = [](double, void*, double*, double*) { return 1; };
  CHECK(qdp_sigma2_quadrature_fn(&p, abort_fn, nullptr, 1.0, 1e-10, &f) != QDP_OK);

  double arg, mn;
  int isflat;
  const auto k9 = direct(0.9, 0.1);
  const auto p7 = unit(0.7);
  REQUIRE(qdp_optimize(&p7, &k9, QDP_VARY_THETA, 0.0, pi, &arg, &mn, &isflat) == QDP_OK);
  CHECK(std::abs(arg - 3 * pi / 4) < 1e-6);
  CHECK(isflat == 0);
}

TEST_CASE("C API: noise model queries") {
  const auto n = direct(0.9, 0.01);
  double re[4], im[4];
  REQUIRE(qdp_poles(&n, re, im) == QDP_OK);
  CHECK(re[0] == doctest::Approx(0.316188).epsilon(1e-5));
  CHECK(im[0] == doctest::Approx(0.005).epsilon(1e-6));
  double freq[4], q[4];
  size_t count = 0;
  REQUIRE(qdp_peaks(&n, freq, q, 4, &count) == QDP_OK);
  REQUIRE(count == 2);
  CHECK(q[0] == doctest::Approx(31.62).epsilon(1e-3));
  const auto undamped = direct(0.5, 0.0);
  REQUIRE(qdp_peaks(&undamped, freq, q, 4, &count) == QDP_OK);
  CHECK(std::isnan(q[0]));

  double sxx, syy, rxy, ixy;
  const qdp_noise cor{1.0, 0.1, 1.0, QDP_CORIOLIS, 0.0, 0.3};
  REQUIRE(qdp_analytic_spectrum(&cor, 0.8, &sxx, &syy, &rxy, &ixy) == QDP_OK);
  CHECK(rxy == 0.0);
  CHECK(sxx == doctest::Approx(syy));
  CHECK(std::abs(ixy) <= std::sqrt(sxx * syy));
}

TEST_CASE("C API: simulate, write, read, estimate") {
  qdp_sim_config c;
  qdp_sim_config_default(&c);
  c.n_steps = 1u << 14;
  c.seed = 12;
  c.record_noise = 1;
  const auto n = direct(0.4, 0.2);
  c.burn_in = qdp_default_burn_in(&n, c.dt, c.n_steps);
  CHECK(c.burn_in == 1000);
  qdp_trajectory* t = nullptr;
  REQUIRE(qdp_simulate(&n, &c, &t) == QDP_OK);
  CHECK(qdp_trajectory_size(t) == c.n_steps - c.burn_in);
  CHECK(qdp_trajectory_has_noise(t) == 1);
  CHECK(qdp_trajectory_column(t, QDP_COL_NOISE_X) != nullptr);

  const std::string path = temp_path("qdp_c_api_traj.csv");
  REQUIRE(qdp_trajectory_write_csv(t, path.c_str(), "c api test") == QDP_OK);
  qdp_trajectory* back = nullptr;
  REQUIRE(qdp_trajectory_read_csv(path.c_str(), &back) == QDP_OK);
  REQUIRE(qdp_trajectory_size(back) == qdp_trajectory_size(t));
  const double* a = qdp_trajectory_column(t, QDP_COL_AX);
  const double* b = qdp_trajectory_column(back, QDP_COL_AX);
  CHECK(std::memcmp(a, b, sizeof(double) * qdp_trajectory_size(t)) == 0);

  qdp_welch_config w;
  qdp_welch_config_default(&w);
  qdp_spectrum *s1 = nullptr, *s2 = nullptr;
  REQUIRE(qdp_estimate_noise_spectra(t, c.dt, &w, &s1) == QDP_OK);
  REQUIRE(qdp_estimate_noise_spectra(back, c.dt, &w, &s2) == QDP_OK);
  REQUIRE(qdp_spectrum_size(s1) == qdp_spectrum_size(s2));
  CHECK(qdp_spectrum_size(s1) == qdp_spectrum_segment_length(s1) / 2 + 1);
  CHECK(qdp_spectrum_averages(s1) >= 10);
  for (size_t i = 0; i < qdp_spectrum_size(s1); ++i) {
    double o1, x1, y1, r1, i1, o2, x2, y2, r2, i2;
    qdp_spectrum_bin(s1, i, &o1, &x1, &y1, &r1, &i1);
    qdp_spectrum_bin(s2, i, &o2, &x2, &y2, &r2, &i2);
    CHECK(x1 == x2);
    CHECK(r1 == r2);
  }
  double re_se, im_se;
  CHECK(qdp_spectrum_stderr(s1, 3, &re_se, &im_se) == QDP_OK);
  CHECK(re_se > 0.0);
  CHECK(qdp_spectrum_bin(s1, qdp_spectrum_size(s1), &re_se, &re_se, &re_se, &re_se, &re_se) ==
        QDP_ERR_INVALID_ARGUMENT);
  CHECK(qdp_spectrum_integrated_power_x(s1) > 0.0);
  const std::string spath = temp_path("qdp_c_api_spec.csv");
  REQUIRE(qdp_spectrum_write_csv(s1, spath.c_str(), nullptr) == QDP_OK);
  std::ifstream in(spath);
  std::string head;
  std::getline(in, head);
  CHECK(head == "omega,Sxx,Syy,ReSxy,ImSxy,n_avg");

  qdp_spectrum_free(s1);
  qdp_spectrum_free(s2);
  qdp_trajectory_free(t);
  qdp_trajectory_free(back);
  qdp_trajectory_free(nullptr);
  std::filesystem::remove(path);
  std::filesystem::remove(spath);
}

TEST_CASE("C API: Monte Carlo") {
  const auto p = unit(1.0, 0.2);
  auto n = direct(0.3, 0.5);
  n.s0 = 1e-4;
  qdp_sim_config c;
  qdp_sim_config_default(&c);
  c.n_steps = 0;
  c.seed = 8;
  qdp_mc_summary s{};
  std::vector<double> phases(40);
  REQUIRE(qdp_mc_sigma2(&p, &n, &c, phases.size(), 2, &s, phases.data()) == QDP_OK);
  CHECK(s.n == 40);
  double mean = 0.0;
  for (double v : phases) mean += v / phases.size();
  CHECK(mean == doctest::Approx(s.mean));
  qdp_mc_summary s1{};
  REQUIRE(qdp_mc_sigma2(&p, &n, &c, phases.size(), 1, &s1, nullptr) == QDP_OK);
  CHECK(s1.variance == s.variance);
  CHECK(qdp_mc_sigma2(&p, &n, &c, 0, 1, &s1, nullptr) == QDP_ERR_INVALID_ARGUMENT);

}
