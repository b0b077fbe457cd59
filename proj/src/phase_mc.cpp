#include "qdephase/phase_mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "qdephase/error.hpp"

namespace qdephase {

namespace {

struct PeriodGrid {
  std::size_t full = 0;  // whole steps inside the period
  double rest = 0.0;     // length of the trailing partial step
};

PeriodGrid period_grid(const InterferometerParams& p, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "accumulate_phase: dt must be > 0");
  const double period = p.period();
  PeriodGrid g;
  g.full = static_cast<std::size_t>(std::floor(period / dt + 1e-9));
  g.rest = period - static_cast<double>(g.full) * dt;
  if (g.rest < 1e-9 * dt) g.rest = 0.0;
  return g;
}

}  // namespace

std::size_t samples_per_period(const InterferometerParams& p, double dt) {
  const PeriodGrid g = period_grid(p, dt);
  return g.full + (g.rest > 0.0 ? 2 : 1);
}

PhaseSample accumulate_phase(std::span<const double> dax, std::span<const double> day,
                             double dt, const InterferometerParams& p) {
  p.validate();
  if (dax.size() != day.size()) {
    throw Error(ErrorCode::invalid_argument, "accumulate_phase: series lengths differ");
  }
  const PeriodGrid g = period_grid(p, dt);
  const std::size_t need = g.full + (g.rest > 0.0 ? 2 : 1);
  if (dax.size() < need) {
    throw Error(ErrorCode::invalid_argument,
                "accumulate_phase: need " + std::to_string(need) + " samples for one period, got " +
                    std::to_string(dax.size()));
  }
  auto integrand = [&](double ax, double ay, double t) {
    const Displacement d = differential_trajectory(p, t);
    return ax * d.dx + ay * d.dy;
  };
  double sum = 0.0;
  double prev = integrand(dax[0], day[0], 0.0);
  for (std::size_t j = 1; j <= g.full; ++j) {
    const double cur = integrand(dax[j], day[j], static_cast<double>(j) * dt);
    sum += 0.5 * (prev + cur) * dt;
    prev = cur;
  }
  if (g.rest > 0.0) {
    const double w = g.rest / dt;
    const double ax = dax[g.full] + w * (dax[g.full + 1] - dax[g.full]);
    const double ay = day[g.full] + w * (day[g.full + 1] - day[g.full]);
    sum += 0.5 * (prev + integrand(ax, ay, p.period())) * g.rest;
  }
  return {p.mass / p.hbar * sum, 0};
}

McResult summarize_phases(std::vector<PhaseSample> samples) {
  McResult r;
  r.n = samples.size();
  if (r.n == 0) throw Error(ErrorCode::invalid_argument, "summarize_phases: no samples");
  const double n = static_cast<double>(r.n);
  double sum = 0.0;
  for (const auto& s : samples) sum += s.delta_phi;
  r.mean = sum / n;
  double m2 = 0.0, m4 = 0.0;
  Complex phasor{0.0, 0.0};
  for (const auto& s : samples) {
    const double d = s.delta_phi - r.mean;
    m2 += d * d;
    m4 += d * d * d * d;
    phasor += std::polar(1.0, s.delta_phi);
  }
  r.dephasing_factor = phasor / n;
  if (r.n > 1) {
    r.variance = m2 / (n - 1.0);
    r.variance_std_error = r.variance * std::sqrt(2.0 / (n - 1.0));
    double c2 = 0.0;
    for (const auto& s : samples) {
      const double d = std::cos(s.delta_phi) - r.dephasing_factor.real();
      c2 += d * d;
    }
    r.dephasing_std_error = std::sqrt(c2 / (n - 1.0) / n);
    const double pop2 = m2 / n;
    r.excess_kurtosis = pop2 > 0.0 ? (m4 / n) / (pop2 * pop2) - 3.0 : 0.0;
  }
  r.dephasing_unresolved = r.variance >= kUnresolvedDephasingVariance;
  r.samples = std::move(samples);
  return r;
}

McResult mc_sigma2(const InterferometerParams& p, const NoiseParams& n, SimConfig c,
                   std::size_t realizations, unsigned threads) {
  p.validate();
  n.validate();
  if (realizations == 0) throw Error(ErrorCode::invalid_argument, "mc.realizations: must be >= 1");
  const std::size_t window = samples_per_period(p, c.dt);
  if (c.n_steps == 0) {
    if (c.burn_in == 0) {
      c.burn_in = SimConfig::default_burn_in(n, c.dt, std::numeric_limits<std::size_t>::max());
      if (!(n.gamma > 0.0)) c.burn_in = 0;
    }
    c.n_steps = c.burn_in + 2 * window;
  }
  c.record_noise = false;
  c.validate(n);
  if (c.n_steps - c.burn_in < window) {
    throw Error(ErrorCode::invalid_argument,
                "sim.n_steps: recorded span shorter than one trap period");
  }

  std::vector<PhaseSample> samples(realizations);
  auto run_one = [&](std::size_t i) {
    SimConfig local = c;
    local.seed = derive_seed(c.seed, i);
    const TrajectoryRecord rec = simulate(n, local);
    const AccelerationSeries a = acceleration_series(rec);
    std::mt19937_64 pick(derive_seed(local.seed, 0));
    std::uniform_int_distribution<std::size_t> offset_dist(0, rec.size() - window);
    const std::size_t offset = offset_dist(pick);
    PhaseSample s = accumulate_phase(std::span(a.x).subspan(offset, window),
                                     std::span(a.y).subspan(offset, window), c.dt, p);
    s.seed = local.seed;
    samples[i] = s;
  };

  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, realizations));
  if (workers <= 1) {
    for (std::size_t i = 0; i < realizations; ++i) run_one(i);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < realizations; i += workers) run_one(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return summarize_phases(std::move(samples));
}

}  // namespace qdephase
