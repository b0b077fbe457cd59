#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qdephase/quadrature.hpp"

using namespace qdephase;

TEST_CASE("polynomials are exact") {
  const std::vector<double> b{0.0, 2.0};
  const auto q = integrate_adaptive([](double x) { return std::pow(x, 7) - 3 * x * x; }, b,
                                    1e-12, 0.0);
  CHECK(q.converged);
  CHECK(q.value == doctest::Approx(256.0 / 8.0 - 8.0).epsilon(1e-14));
}

TEST_CASE("Lorentzian resolved from a coarse partition") {
  const double g = 1e-3;
  const std::vector<double> b{-1.0, 1.0};
  const auto q = integrate_adaptive([&](double x) { return g / (x * x + g * g); }, b, 1e-11,
                                    0.0);
  CHECK(q.converged);
  CHECK(q.value == doctest::Approx(2.0 * std::atan(1.0 / g)).epsilon(1e-10));
  CHECK(q.abs_error < 1e-10 * q.value);
}

TEST_CASE("oscillatory integrand with breakpoints") {
  std::vector<double> b{0.0};
  for (int m = 1; m <= 50; ++m) b.push_back(m * std::numbers::pi);
  const auto q = integrate_adaptive([](double x) { return std::sin(x) * std::sin(x); }, b,
                                    1e-12, 0.0);
  CHECK(q.value == doctest::Approx(25.0 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("interval budget exhaustion is reported") {
  const std::vector<double> b{0.0, 1.0};
  const auto q = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x + 1e-300); }, b,
                                    1e-15, 0.0, 20);
  CHECK_FALSE(q.converged);
  CHECK(q.intervals <= 20);
}
