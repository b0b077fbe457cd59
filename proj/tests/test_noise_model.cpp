#include <cmath>
#include <random>

#include "doctest.h"
#include "qdephase/error.hpp"
#include "qdephase/noise_model.hpp"

using namespace qdephase;

namespace {

NoiseParams direct(double om, double k, double gamma, double s0 = 1.0) {
  NoiseParams n;
  n.apparatus_omega = om;
  n.gamma = gamma;
  n.s0 = s0;
  n.coupling = DirectCoupling{k};
  return n;
}

NoiseParams coriolis(double om, double rate, double gamma, double s0 = 1.0) {
  NoiseParams n;
  n.apparatus_omega = om;
  n.gamma = gamma;
  n.s0 = s0;
  n.coupling = Coriolis{rate};
  return n;
}

// Independent route: S = w^4 S0 chi chi^dagger with chi the inverse of the
// equation-of-motion matrix, inverted numerically here. Fourier convention
// x(t) = int X(w) e^{+i w t} dw, so d/dt -> +i w and the correlation is
// int S e^{-i w tau} dw.
SpectralPoint spectrum_oracle(const NoiseParams& n, double w) {
  const Complex i(0.0, 1.0);
  const double om2 = n.apparatus_omega * n.apparatus_omega;
  Complex t11 = om2 - w * w + i * w * n.gamma;
  Complex t12, t21;
  if (n.is_coriolis()) {
    t12 = -2.0 * i * w * n.coriolis_rate();
    t21 = -t12;
  } else {
    t12 = t21 = -n.direct_k();
  }
  const Complex det = t11 * t11 - t12 * t21;
  const Complex c11 = t11 / det, c12 = -t12 / det, c21 = -t21 / det, c22 = t11 / det;
  const double w4s0 = std::pow(w, 4) * n.s0;
  SpectralPoint s;
  s.sxx = w4s0 * (std::norm(c11) + std::norm(c12));
  s.syy = w4s0 * (std::norm(c21) + std::norm(c22));
  s.sxy = w4s0 * (c11 * std::conj(c21) + c12 * std::conj(c22));
  return s;
}

}  // namespace

TEST_CASE("validation messages") {
  CHECK_THROWS_WITH_AS(direct(1.0, 1.1, 0.1).validate(), "noise.k: |k| must be < Omega0^2",
                       Error);
  CHECK_THROWS_WITH_AS(direct(1.0, 0.0, -0.1).validate(), doctest::Contains("noise.gamma"),
                       Error);
  CHECK_THROWS_WITH_AS(direct(0.0, 0.0, 0.1).validate(), doctest::Contains("noise.Omega0"),
                       Error);
  CHECK_THROWS_WITH_AS(direct(1.0, 0.0, 0.1, -1.0).validate(), doctest::Contains("noise.S0"),
                       Error);
}

TEST_CASE("susceptibility examples") {
  auto chi = susceptibility(direct(1.0, 0.9, 0.3), 0.0);
  CHECK(chi[0][0].real() == doctest::Approx(1.0 / 0.19).epsilon(1e-13));
  CHECK(chi[0][1].real() == doctest::Approx(0.9 / 0.19).epsilon(1e-13));
  CHECK(chi[1][0].real() == doctest::Approx(0.9 / 0.19).epsilon(1e-13));
  CHECK(chi[1][1].real() == doctest::Approx(5.2632).epsilon(1e-4));
  CHECK(chi[0][1].real() == doctest::Approx(4.7368).epsilon(1e-4));

  chi = susceptibility(direct(2.0, 0.0, 0.3), 0.0);
  CHECK(chi[0][0].real() == doctest::Approx(0.25));
  CHECK(std::abs(chi[0][1]) == 0.0);

  chi = susceptibility(coriolis(2.0, 0.7, 0.3), 0.0);
  CHECK(chi[0][0].real() == doctest::Approx(0.25));
  CHECK(std::abs(chi[0][1]) == 0.0);
  CHECK(std::abs(chi[1][0]) == 0.0);
}

TEST_CASE("direct-coupling spectrum examples") {
  const auto n = direct(1.0, 0.9, 0.01);
  const auto s = analytic_cross_spectrum(n, 1.0);
  CHECK(s.sxy == Complex(0.0, 0.0));
  CHECK(s.sxx == doctest::Approx(1.0 / 0.8101).epsilon(1e-13));
  CHECK(s.sxx == doctest::Approx(1.23442).epsilon(1e-5));
  // low-frequency w^4 law and high-frequency plateau
  const double a = analytic_cross_spectrum(n, 1e-3).sxx;
  const double b = analytic_cross_spectrum(n, 2e-3).sxx;
  CHECK(b / a == doctest::Approx(16.0).epsilon(1e-3));
  CHECK(analytic_cross_spectrum(n, 1e5).sxx == doctest::Approx(1.0).epsilon(1e-8));
  const auto c = coriolis(1.0, 0.3, 0.1, 2.5);
  CHECK(analytic_cross_spectrum(c, 1e5).sxx == doctest::Approx(2.5).epsilon(1e-8));
}

TEST_CASE("explicit spectra agree with w^4 S0 chi chi^dagger") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double om = 0.3 + 2.0 * u(rng);
    const double gamma = 2.0 * u(rng) * om + 1e-3;
    const NoiseParams n = trial % 2 ? direct(om, (2.0 * u(rng) - 1.0) * 0.99 * om * om, gamma)
                                    : coriolis(om, 2.0 * u(rng) - 1.0, gamma);
    const double w = 5.0 * om * u(rng);
    const auto got = analytic_cross_spectrum(n, w);
    const auto want = spectrum_oracle(n, w);
    const double scale = want.sxx + 1e-300;
    CHECK(std::abs(got.sxx - want.sxx) <= 1e-12 * scale);
    CHECK(std::abs(got.syy - want.syy) <= 1e-12 * scale);
    CHECK(std::abs(got.sxy - want.sxy) <= 1e-12 * scale);
  }
}

TEST_CASE("Hermitian symmetry and Cauchy-Schwarz on a grid") {
  const auto grid = log_grid(1e-2, 1e2, 200);
  for (const auto& n : {direct(1.0, 0.9, 0.01), direct(1.0, -0.5, 1.5), coriolis(1.0, 0.4, 0.05)}) {
    const auto m = analytic_cross_spectra(n, grid);
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(m.sxx[i] >= 0.0);
      CHECK(m.syy[i] >= 0.0);
      CHECK(std::abs(m.sxy[i]) <= std::sqrt(m.sxx[i] * m.syy[i]) * (1.0 + 1e-12));
      // S_yx(w) = conj(S_xy(w)) and S_xy(-w) = conj(S_xy(w))
      const auto neg = analytic_cross_spectrum(n, -grid[i]);
      CHECK(std::abs(neg.sxy - std::conj(m.sxy[i])) <= 1e-12 * std::abs(m.sxy[i]) + 1e-300);
    }
  }
}

TEST_CASE("direct co-spectrum changes sign at Omega0") {
  const auto n = direct(1.3, 0.6, 0.05);
  for (double w : {0.1, 0.5, 1.0, 1.29}) CHECK(analytic_cross_spectrum(n, w).sxy.real() > 0.0);
  for (double w : {1.31, 1.5, 3.0, 30.0}) CHECK(analytic_cross_spectrum(n, w).sxy.real() < 0.0);
  CHECK(analytic_cross_spectrum(n, 1.3).sxy.real() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Coriolis co-spectrum vanishes identically") {
  const auto n = coriolis(1.0, 0.37, 0.02);
  for (double w : log_grid(1e-3, 1e3, 100)) {
    const auto s = analytic_cross_spectrum(n, w);
    CHECK(s.sxy.real() == 0.0);
  }
}

TEST_CASE("normal-mode spectra") {
  SUBCASE("degenerate at k = 0") {
    const auto n = direct(1.0, 0.0, 0.2);
    for (double w : {0.1, 0.9, 1.0, 4.0}) {
      const auto m = normal_mode_spectra(n, w);
      CHECK(m.suu == m.svv);
    }
  }
  SUBCASE("reconstruction identity") {
    // Acceleration spectra rebuilt from the U/V position spectra.
    const auto n = direct(1.0, 0.9, 0.01, 1.7);
    for (double w : {0.05, 0.3, 0.7, 1.0, 1.4, 6.0}) {
      const auto m = normal_mode_spectra(n, w);
      const auto s = analytic_cross_spectrum(n, w);
      const double w4 = std::pow(w, 4);
      CHECK(s.sxx == doctest::Approx(0.5 * w4 * (m.suu + m.svv)).epsilon(1e-12));
      CHECK(s.sxy.real() == doctest::Approx(0.5 * w4 * (m.suu - m.svv)).epsilon(1e-12));
    }
  }
  SUBCASE("U resonance height") {
    const auto n = direct(1.0, 0.9, 0.01);
    const auto m = normal_mode_spectra(n, std::sqrt(0.1));
    CHECK(m.suu == doctest::Approx(1e5).epsilon(1e-12));
  }
  SUBCASE("wrong variant") {
    CHECK_THROWS_WITH_AS(normal_mode_spectra(coriolis(1.0, 0.1, 0.1), 1.0),
                         "normal modes defined only for direct coupling", Error);
  }
}

TEST_CASE("poles") {
  const auto n = direct(1.0, 0.9, 0.01);
  const auto ps = poles(n);
  CHECK(ps.poles[0].real() == doctest::Approx(0.316188).epsilon(1e-6));
  CHECK(ps.poles[0].imag() == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(ps.poles[2].real() == doctest::Approx(1.378396).epsilon(1e-6));
  CHECK(ps.poles[2].imag() == doctest::Approx(0.005).epsilon(1e-12));
  for (const auto& z : ps.poles) {
    CHECK(std::abs(susceptibility_determinant(n, z)) < 1e-12);
    // closure under w -> -conj(w)
    bool found = false;
    for (const auto& other : ps.poles) found |= std::abs(other + std::conj(z)) < 1e-12;
    CHECK(found);
  }
  const auto undamped = poles(direct(1.0, 0.0, 0.0));
  for (const auto& z : undamped.poles) {
    CHECK(std::abs(std::abs(z.real()) - 1.0) < 1e-15);
    CHECK(z.imag() == 0.0);
  }
}

TEST_CASE("peaks and Q") {
  SUBCASE("Fig. 3 regime") {
    const auto n = direct(1.0, 0.9, 0.01);
    const auto r = peaks_and_q(n, default_peak_grid(n));
    REQUIRE(r.analytic.peak_frequencies.size() == 2);
    CHECK(r.analytic.peak_frequencies[0] == doctest::Approx(0.316188).epsilon(1e-6));
    CHECK(r.analytic.peak_frequencies[1] == doctest::Approx(1.378396).epsilon(1e-6));
    CHECK(*r.analytic.q_factors[0] == doctest::Approx(31.62).epsilon(1e-3));
    CHECK(*r.analytic.q_factors[1] == doctest::Approx(137.84).epsilon(1e-3));
    REQUIRE(r.grid_search.peak_frequencies.size() == 2);
    CHECK(r.grid_search.peak_frequencies[0] == doctest::Approx(0.3162).epsilon(2e-3));
    CHECK(r.grid_search.peak_frequencies[1] == doctest::Approx(1.3784).epsilon(2e-3));
  }
  SUBCASE("heavy damping hides the U resonance") {
    const auto n = direct(1.0, 0.9, 1.5);
    const auto r = peaks_and_q(n, default_peak_grid(n));
    REQUIRE(r.analytic.peak_frequencies.size() == 1);
    CHECK(r.analytic.peak_frequencies[0] == doctest::Approx(std::sqrt(1.9 - 0.5625)));
    CHECK(r.analytic.peak_frequencies[0] == doctest::Approx(1.156).epsilon(1e-3));
    CHECK(r.grid_search.peak_frequencies.size() <= 1);
  }
  SUBCASE("undamped: Q absent") {
    const auto n = direct(1.0, 0.5, 0.0);
    const auto r = peaks_and_q(n, {});
    REQUIRE(r.analytic.peak_frequencies.size() == 2);
    CHECK(r.analytic.peak_frequencies[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(r.analytic.peak_frequencies[1] == doctest::Approx(std::sqrt(1.5)));
    CHECK_FALSE(r.analytic.q_factors[0].has_value());
  }
  SUBCASE("degenerate modes at k = 0") {
    const auto n = direct(1.0, 0.0, 1e-6);
    const auto r = peaks_and_q(n, {});
    REQUIRE(r.analytic.peak_frequencies.size() == 1);
    CHECK(r.analytic.peak_frequencies[0] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("Coriolis has no normal modes") {
    CHECK_THROWS_AS(peaks_and_q(coriolis(1.0, 0.2, 0.1), {}), Error);
  }
}
