#include "qdephase/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "qdephase/error.hpp"

namespace qdephase {

namespace {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr double kNodes[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr double kKronrodWeights[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights belong to the odd-indexed nodes above.
constexpr double kGaussWeights[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Interval {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;

  bool operator<(const Interval& other) const { return error < other.error; }
};

Interval gauss_kronrod21(const std::function<double(double)>& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double fc = f(center);
  double kronrod = kKronrodWeights[10] * fc;
  double gauss = 0.0;
  double abs_integral = std::abs(kronrod);
  double f_lo[10];
  double f_hi[10];
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kNodes[j];
    f_lo[j] = f(center - dx);
    f_hi[j] = f(center + dx);
    const double sum = f_lo[j] + f_hi[j];
    kronrod += kKronrodWeights[j] * sum;
    abs_integral += kKronrodWeights[j] * (std::abs(f_lo[j]) + std::abs(f_hi[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }

  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j) {
    asc += kKronrodWeights[j] * (std::abs(f_lo[j] - mean) + std::abs(f_hi[j] - mean));
  }

  const double value = kronrod * half;
  abs_integral *= std::abs(half);
  asc *= std::abs(half);
  double error = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && error != 0.0) {
    error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  }
  if (abs_integral > std::numeric_limits<double>::min() / (50.0 * eps)) {
    error = std::max(50.0 * eps * abs_integral, error);
  }
  return {a, b, value, error};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breaks, double rel_tol,
                                    double abs_tol, std::size_t max_intervals) {
  if (breaks.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "integrate_adaptive: need at least two break points");
  }
  std::vector<double> points(breaks.begin(), breaks.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  std::priority_queue<Interval> active;
  std::vector<Interval> frozen;  // too narrow to bisect further
  QuadratureResult out;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    active.push(gauss_kronrod21(f, points[i], points[i + 1]));
    out.evaluations += 21;
  }

  auto totals = [&] {
    double value = 0.0;
    double error = 0.0;
    for (const auto& iv : frozen) {
      value += iv.value;
      error += iv.error;
    }
    auto copy = active;
    while (!copy.empty()) {
      value += copy.top().value;
      error += copy.top().error;
      copy.pop();
    }
    return std::pair{value, error};
  };

  double value = 0.0;
  double error = 0.0;
  {
    auto [v, e] = totals();
    value = v;
    error = e;
  }
  while (!active.empty() && error > std::max(abs_tol, rel_tol * std::abs(value)) &&
         active.size() + frozen.size() < max_intervals) {
    const Interval worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 1e-13 * std::max(std::abs(worst.a), std::abs(worst.b))) {
      frozen.push_back(worst);
      continue;
    }
    const Interval left = gauss_kronrod21(f, worst.a, mid);
    const Interval right = gauss_kronrod21(f, mid, worst.b);
    out.evaluations += 42;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
  }

  auto [v, e] = totals();
  out.value = v;
  out.abs_error = e;
  out.intervals = active.size() + frozen.size();
  out.converged = e <= std::max(abs_tol, rel_tol * std::abs(v));
  return out;
}

}  // namespace qdephase
