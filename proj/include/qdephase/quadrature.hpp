#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace qdephase {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t intervals = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Globally adaptive 21-point Gauss-Kronrod integration over [breaks.front(),
/// breaks.back()]. Interior break points seed the initial partition; the
/// interval with the largest error estimate is bisected until the total error
/// falls below max(abs_tol, rel_tol * |value|) or max_intervals is reached.
/// Never throws on non-convergence; check `converged`.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breaks, double rel_tol,
                                    double abs_tol, std::size_t max_intervals = 50000);

}  // namespace qdephase
