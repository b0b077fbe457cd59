#include "qdephase/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qdephase/error.hpp"

namespace qdephase {

namespace {

ApparatusState axpy(const ApparatusState& s, double h, const ApparatusState& d) {
  return {s.x + h * d.x, s.y + h * d.y, s.vx + h * d.vx, s.vy + h * d.vy};
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double fastest_mode_frequency(const NoiseParams& n) {
  const double om2 = n.apparatus_omega * n.apparatus_omega;
  if (n.is_coriolis()) {
    const double r = std::abs(n.coriolis_rate());
    return r + std::sqrt(r * r + om2);
  }
  return std::sqrt(om2 + std::abs(n.direct_k()));
}

void SimConfig::validate(const NoiseParams& n) const {
  if (!std::isfinite(dt) || !(dt > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "sim.dt: must be > 0");
  }
  if (!(burn_in < n_steps)) {
    throw Error(ErrorCode::invalid_argument, "sim.burn_in: must be < sim.n_steps");
  }
  const double guard = dt * fastest_mode_frequency(n);
  if (!(guard < kStabilityLimit)) {
    throw Error(ErrorCode::invalid_argument,
                "sim.dt: instability guard dt * omega_max < 0.1 violated (dt * omega_max = " +
                    std::to_string(guard) + ")");
  }
}

std::size_t SimConfig::default_burn_in(const NoiseParams& n, double dt, std::size_t n_steps) {
  const std::size_t cap = n_steps / 2;
  if (!(n.gamma > 0.0) || !(dt > 0.0)) return cap;
  const double steps = std::ceil(10.0 / (n.gamma * dt));
  if (steps >= static_cast<double>(cap)) return cap;
  return static_cast<std::size_t>(steps);
}

ApparatusState apparatus_rhs(const ApparatusState& s, NoiseSample a, const NoiseParams& n) {
  const double om2 = n.apparatus_omega * n.apparatus_omega;
  ApparatusState d;
  d.x = s.vx;
  d.y = s.vy;
  if (n.is_coriolis()) {
    const double r2 = 2.0 * n.coriolis_rate();
    d.vx = -om2 * s.x + r2 * s.vy - n.gamma * s.vx + a.ax;
    d.vy = -om2 * s.y - r2 * s.vx - n.gamma * s.vy + a.ay;
  } else {
    const double k = n.direct_k();
    d.vx = -om2 * s.x + k * s.y - n.gamma * s.vx + a.ax;
    d.vy = -om2 * s.y + k * s.x - n.gamma * s.vy + a.ay;
  }
  return d;
}

ApparatusState rk4_step(const ApparatusState& s, NoiseSample now, NoiseSample next,
                        double dt, const NoiseParams& n) {
  const NoiseSample mid{0.5 * (now.ax + next.ax), 0.5 * (now.ay + next.ay)};
  const ApparatusState k1 = apparatus_rhs(s, now, n);
  const ApparatusState k2 = apparatus_rhs(axpy(s, 0.5 * dt, k1), mid, n);
  const ApparatusState k3 = apparatus_rhs(axpy(s, 0.5 * dt, k2), mid, n);
  const ApparatusState k4 = apparatus_rhs(axpy(s, dt, k3), next, n);
  const double h = dt / 6.0;
  return {s.x + h * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.y + h * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
          s.vx + h * (k1.vx + 2.0 * k2.vx + 2.0 * k3.vx + k4.vx),
          s.vy + h * (k1.vy + 2.0 * k2.vy + 2.0 * k3.vy + k4.vy)};
}

WhiteNoiseSource::WhiteNoiseSource(double s0, double dt, std::uint64_t seed)
    : engine_(seed), scale_(std::sqrt(2.0 * std::numbers::pi * s0 / dt)) {
  if (!(s0 >= 0.0) || !(dt > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "white noise: need s0 >= 0 and dt > 0");
  }
}

NoiseSample WhiteNoiseSource::next() {
  const double ax = scale_ * normal_(engine_);
  const double ay = scale_ * normal_(engine_);
  return {ax, ay};
}

WhiteNoiseSeries white_noise_series(double s0, double dt, std::size_t n, std::uint64_t seed) {
  WhiteNoiseSource src(s0, dt, seed);
  WhiteNoiseSeries out;
  out.x.resize(n);
  out.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NoiseSample a = src.next();
    out.x[i] = a.ax;
    out.y[i] = a.ay;
  }
  return out;
}

TrajectoryRecord simulate(const NoiseParams& n, const SimConfig& c) {
  n.validate();
  c.validate(n);
  const std::size_t kept = c.n_steps - c.burn_in;
  TrajectoryRecord rec;
  for (auto* v : {&rec.t, &rec.x, &rec.y, &rec.vx, &rec.vy, &rec.ax, &rec.ay}) {
    v->reserve(kept);
  }
  if (c.record_noise) {
    rec.noise_x.reserve(kept);
    rec.noise_y.reserve(kept);
  }

  WhiteNoiseSource source(n.s0, c.dt, c.seed);
  NoiseSample now = source.next();
  ApparatusState state;
  for (std::size_t j = 0; j < c.n_steps; ++j) {
    if (j >= c.burn_in) {
      const ApparatusState d = apparatus_rhs(state, now, n);
      rec.t.push_back(static_cast<double>(j) * c.dt);
      rec.x.push_back(state.x);
      rec.y.push_back(state.y);
      rec.vx.push_back(state.vx);
      rec.vy.push_back(state.vy);
      rec.ax.push_back(d.vx);
      rec.ay.push_back(d.vy);
      if (c.record_noise) {
        rec.noise_x.push_back(now.ax);
        rec.noise_y.push_back(now.ay);
      }
    }
    if (j + 1 < c.n_steps) {
      const NoiseSample next = source.next();
      state = rk4_step(state, now, next, c.dt, n);
      now = next;
    }
  }
  return rec;
}

AccelerationSeries acceleration_series(const TrajectoryRecord& rec) {
  AccelerationSeries out;
  out.x.resize(rec.ax.size());
  out.y.resize(rec.ay.size());
  std::transform(rec.ax.begin(), rec.ax.end(), out.x.begin(), [](double a) { return -a; });
  std::transform(rec.ay.begin(), rec.ay.end(), out.y.begin(), [](double a) { return -a; });
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ (0xD1B54A32D192ED03ULL * (index + 1)));
}

}  // namespace qdephase
