#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qdephase/dephasing.hpp"
#include "qdephase/error.hpp"

using namespace qdephase;
using std::numbers::pi;

namespace {

NoiseParams direct(double om, double k, double gamma, double s0 = 1.0) {
  NoiseParams n;
  n.apparatus_omega = om;
  n.gamma = gamma;
  n.s0 = s0;
  n.coupling = DirectCoupling{k};
  return n;
}

InterferometerParams unit(double omega0 = 1.0, double theta = 0.0) {
  return InterferometerParams::normalized(omega0, 1.0, theta);
}

}  // namespace

TEST_CASE("generic form examples") {
  const auto p = unit(1.3);
  auto r = sigma2_generic(p, {});
  CHECK(r.sigma2 == 0.0);
  CHECK(r.dephasing_factor == 1.0);

  // constant spectrum, Parseval oracle
  r = sigma2_generic(p, {2.0, 0.0, 2.0, 0.0});
  CHECK(r.sigma2 == doctest::Approx(24.0 * pi * pi * 2.0 / 1.3).epsilon(1e-14));
  CHECK(r.term_zero_freq == doctest::Approx(2.0 * r.term_resonant).epsilon(1e-14));
  CHECK(r.dephasing_factor == doctest::Approx(std::exp(-0.5 * r.sigma2)));

  // maximal destructive interference saturating the Schwarz bound
  r = sigma2_generic(unit(1.0, pi / 4), {3.0, -3.0, 0.0, 0.0});
  CHECK(std::abs(r.sigma2) < 1e-12);

  CHECK_THROWS_WITH_AS(sigma2_generic(unit(1.0, pi / 4), {1.0, -2.0, 0.0, 0.0}),
                       "cross-spectrum exceeds Schwarz bound", Error);
}

TEST_CASE("closed form examples") {
  CHECK(sigma2_closed(unit(), direct(1.0, 0.0, 0.1)).sigma2 ==
        doctest::Approx(800.0 * pi * pi).epsilon(1e-13));
  CHECK(sigma2_closed(unit(), direct(1.0, 0.0, 0.1)).sigma2 ==
        doctest::Approx(7895.68).epsilon(1e-6));
  const auto r = sigma2_closed(unit(1.0, -pi / 4), direct(1.0, 0.9, 0.1));
  CHECK(r.sigma2 == doctest::Approx(8.0 * pi * pi / 0.82).epsilon(1e-13));
  CHECK(r.sigma2 == doctest::Approx(96.25).epsilon(1e-3));
  CHECK(r.term_zero_freq == 0.0);
  CHECK(sigma2_closed(unit(), direct(1.0, 0.3, 0.1, 0.0)).sigma2 == 0.0);
}

TEST_CASE("closed form rejects the undamped resonance and Coriolis") {
  CHECK_THROWS_AS(sigma2_closed(unit(1.0), direct(1.0, 0.0, 0.0)), Error);
  NoiseParams c = direct(1.0, 0.0, 0.1);
  c.coupling = Coriolis{0.2};
  CHECK_THROWS_WITH_AS(sigma2_closed(unit(), c), "normal modes defined only for direct coupling",
                       Error);
}

TEST_CASE("closed form equals the generic form fed with analytic spectra") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double om = 0.2 + 3.0 * u(rng);
    const auto n = direct(om, (2 * u(rng) - 1) * 0.99 * om * om, 0.01 + 2.0 * u(rng), u(rng));
    const auto p = InterferometerParams::normalized(0.1 + 4 * u(rng), u(rng), 2 * pi * u(rng));
    const double a = sigma2_closed(p, n).sigma2;
    const double b = sigma2_residue(p, n).sigma2;
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  }
}

TEST_CASE("quadrature: constant and zero spectra") {
  for (double w0 : {0.4, 1.0, 2.5}) {
    const auto p = InterferometerParams::normalized(w0, 0.8, 0.3);
    const auto r = sigma2_quadrature(p, [](double) { return std::pair{1.5, 0.0}; },
                                     {1e-10, 0.0, w0, {}, 50000});
    CHECK(r.sigma2 == doctest::Approx(24.0 * pi * pi * 0.64 * 1.5 / w0).epsilon(1e-8));
    const auto g = sigma2_generic(p, {1.5, 0.0, 1.5, 0.0});
    CHECK(r.sigma2 == doctest::Approx(g.sigma2).epsilon(1e-8));
    const auto z = sigma2_quadrature(p, [](double) { return std::pair{0.0, 0.0}; });
    CHECK(z.sigma2 == 0.0);
  }
}

TEST_CASE("quadrature reports non-convergence with the achieved bound") {
  const auto p = unit();
  QuadratureOptions opt;
  opt.rel_tol = 1e-12;
  opt.max_intervals = 3;
  opt.frequency_scale = 1.0;
  auto lorentz = [](double w) { return std::pair{1e-4 / ((w - 3.3) * (w - 3.3) + 1e-8), 0.0}; };
  try {
    sigma2_quadrature(p, lorentz, opt);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(e.achieved_error() > 0.0);
    CHECK(e.code() == ErrorCode::numerical);
  }
}

TEST_CASE("contour residue sum reproduces the quadrature") {
  // Two independent evaluations of the defining integral.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    CAPTURE(i);
    NoiseParams n = direct(0.5 + u(rng), 0.0, 0.01 + 1.5 * u(rng), 0.1 + u(rng));
    const double om2 = n.apparatus_omega * n.apparatus_omega;
    if (i % 3 == 2) n.coupling = Coriolis{2.0 * u(rng) - 1.0};
    else n.coupling = DirectCoupling{(2.0 * u(rng) - 1.0) * 0.95 * om2};
    const auto p = InterferometerParams::normalized(0.3 + 3.0 * u(rng), 1.0, 2 * pi * u(rng));
    const double quad = sigma2_quadrature(p, n, 1e-10).sigma2;
    const auto c = sigma2_contour(p, n);
    CHECK(c.sigma2 == doctest::Approx(quad).epsilon(1e-8));
    // Real-axis residues alone are the residue form.
    CHECK(c.term_resonant + c.term_zero_freq ==
          doctest::Approx(sigma2_residue(p, n).sigma2).epsilon(1e-12));
  }
}

TEST_CASE("spectral poles carry a real contribution for resonant noise") {
  // The residue form keeps only the real-axis poles; for a sharp apparatus
  // resonance at omega0 the remaining poles are not negligible.
  const auto p = unit();
  const auto n = direct(1.0, 0.0, 0.1);
  const auto c = sigma2_contour(p, n);
  CHECK(c.term_resonant == doctest::Approx(800.0 * pi * pi).epsilon(1e-12));
  CHECK(c.term_spectral_poles < -0.8 * c.term_resonant);
  CHECK(c.sigma2 == doctest::Approx(sigma2_quadrature(p, n).sigma2).epsilon(1e-9));
  CHECK(c.sigma2 == doctest::Approx(1112.17498046525).epsilon(1e-10));
}

TEST_CASE("variance is non-negative for every theta") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const auto n = direct(1.0, (2 * u(rng) - 1) * 0.99, 0.01 + u(rng));
    const double w0 = 0.2 + 3.0 * u(rng);
    for (int j = 0; j < 16; ++j) {
      const auto p = unit(w0, 2 * pi * j / 16.0);
      CHECK(sigma2_closed(p, n).sigma2 >= 0.0);
      if (j % 4 == 1) CHECK(sigma2_quadrature(p, n, 1e-8).sigma2 >= 0.0);
    }
  }
}

TEST_CASE("theta extremality at the diagonals") {
  const auto n = direct(1.0, 0.6, 0.2);
  for (double w0 : {0.5, 1.0, 1.7}) {
    for (double theta : {pi / 4, -pi / 4, 3 * pi / 4, 5 * pi / 4}) {
      const double h = 1e-4;
      const double fp = sigma2_closed(unit(w0, theta + h), n).sigma2;
      const double fm = sigma2_closed(unit(w0, theta - h), n).sigma2;
      const double f = sigma2_closed(unit(w0, theta), n).sigma2;
      CHECK(std::abs(fp - fm) / (2 * h) < 1e-8 * f);
    }
  }
}

TEST_CASE("suppression identity at omega0 = Omega0") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double om = 0.3 + 2.0 * u(rng);
    const double k = (2 * u(rng) - 1) * 0.99 * om * om;
    const double gamma = 0.005 + u(rng);
    const double base = sigma2_closed(unit(om, 2 * pi * u(rng)), direct(om, 0.0, gamma)).sigma2;
    // destructive branch: cos^2(theta + pi/4) = 1 when k > 0, sin^2 = 1 when k < 0
    const double theta = k > 0 ? -pi / 4 : pi / 4;
    const double best = sigma2_closed(unit(om, theta), direct(om, k, gamma)).sigma2;
    const double want = om * om * gamma * gamma / (k * k + om * om * gamma * gamma);
    CHECK(best / base == doctest::Approx(want).epsilon(1e-12));
  }
  const double ratio = sigma2_closed(unit(1.0, -pi / 4), direct(1.0, 0.9, 0.1)).sigma2 /
                       sigma2_closed(unit(1.0, 0.0), direct(1.0, 0.0, 0.1)).sigma2;
  CHECK(ratio == doctest::Approx(0.01 / 0.82).epsilon(1e-12));
}

TEST_CASE("SNR") {
  const auto n = direct(1.0, 0.0, 0.1);
  const auto r = snr(unit(), n, 1.0);
  CHECK(r.snr == doctest::Approx(std::sqrt(0.01 / 2)).epsilon(1e-12));
  CHECK(r.snr == doctest::Approx(r.signal_phase / r.sigma));
  CHECK(snr(unit(1.0, pi / 2), n, 1.0).snr == doctest::Approx(0.0));
  CHECK_THROWS_WITH_AS(snr(unit(), direct(1.0, 0.0, 0.1, 0.0), 1.0), "noiseless SNR undefined",
                       Error);
  const auto m = direct(1.3, 0.5, 0.2, 0.7);
  const auto pm = InterferometerParams::normalized(0.8, 1.0, -pi / 4);
  const auto q = snr(pm, m, 9.81);
  CHECK(q.snr == doctest::Approx(signal_phase(pm, 9.81) /
                                 std::sqrt(sigma2_closed(pm, m).sigma2)).epsilon(1e-14));
}

TEST_CASE("optimize over theta picks the destructive diagonal") {
  const auto n = direct(1.0, 0.9, 0.1);
  const auto r = optimize(unit(0.7), n, OptimizeVariable::theta, {0.0, pi});
  CHECK_FALSE(r.flat_objective);
  CHECK(std::abs(r.argmin - 3 * pi / 4) < 1e-6);
  CHECK(std::pow(std::cos(r.argmin + pi / 4), 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("optimize over k runs to a bound at resonance") {
  const auto n = direct(1.0, 0.0, 0.1);
  const auto r = optimize(unit(1.0, pi / 4), n, OptimizeVariable::k, {-0.99, 0.99});
  CHECK(std::abs(std::abs(r.argmin) - 0.99) < 1e-9);
  // grid-scan oracle: strictly decreasing in |k|
  double prev = sigma2_closed(unit(1.0, pi / 4), direct(1.0, 0.0, 0.1)).sigma2;
  for (int i = 1; i <= 99; ++i) {
    const double k = -0.01 * i;
    const double f = sigma2_closed(unit(1.0, pi / 4), direct(1.0, k, 0.1)).sigma2;
    CHECK(f < prev);
    prev = f;
  }
  CHECK(r.min_sigma2 <= prev * (1 + 1e-12));
}

TEST_CASE("optimize over theta is flat without coupling") {
  const auto r = optimize(unit(0.7), direct(1.0, 0.0, 0.1), OptimizeVariable::theta, {0.0, pi});
  CHECK(r.flat_objective);
}

TEST_CASE("optimize argument checks") {
  NoiseParams c = direct(1.0, 0.0, 0.1);
  c.coupling = Coriolis{0.3};
  CHECK_THROWS_AS(optimize(unit(), c, OptimizeVariable::k, {-0.5, 0.5}), Error);
  CHECK_THROWS_AS(optimize(unit(), direct(1.0, 0, 0.1), OptimizeVariable::k, {-1.5, 0.5}), Error);
  CHECK_THROWS_AS(optimize(unit(), direct(1.0, 0, 0.1), OptimizeVariable::theta, {1.0, 1.0}),
                  Error);
  CHECK_THROWS_AS(optimize(unit(), direct(1.0, 0, 0.1), OptimizeVariable::gamma, {-0.1, 1.0}),
                  Error);
}
