#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

namespace qdcli {

namespace {

struct TrajectoryDeleter {
  void operator()(qdp_trajectory* t) const { qdp_trajectory_free(t); }
};
struct SpectrumDeleter {
  void operator()(qdp_spectrum* s) const { qdp_spectrum_free(s); }
};
using TrajectoryPtr = std::unique_ptr<qdp_trajectory, TrajectoryDeleter>;
using SpectrumPtr = std::unique_ptr<qdp_spectrum, SpectrumDeleter>;

std::string output_format_of(const std::string& command) {
  if (command == "psd" || command == "simulate" || command == "estimate-psd" ||
      command == "sweep") {
    return "csv";
  }
  return "json";
}

nlohmann::ordered_json with_meta(const RunConfig& cfg, const std::string& command) {
  nlohmann::ordered_json j;
  j["version"] = qdp_version();
  j["command"] = command;
  j["config"] = cfg.resolved_json();
  return j;
}

void emit_text(const RunConfig& cfg, const std::string& text) {
  if (cfg.output_path.empty() || cfg.output_path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(cfg.output_path);
  if (!os) throw RunError(kExitIo, "cannot open '" + cfg.output_path + "' for writing");
  os << text;
  os.close();
  if (!os) throw RunError(kExitIo, "failed writing '" + cfg.output_path + "'");
}

const char* out_path(const RunConfig& cfg) {
  return cfg.output_path.empty() ? nullptr : cfg.output_path.c_str();
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

void check(qdp_status s) {
  switch (s) {
    case QDP_OK: return;
    case QDP_ERR_INVALID_ARGUMENT:
    case QDP_ERR_WRONG_VARIANT: throw RunError(kExitConfig, qdp_last_error());
    case QDP_ERR_NUMERICAL: throw RunError(kExitNumerical, qdp_last_error());
    case QDP_ERR_IO: throw RunError(kExitIo, qdp_last_error());
    default: throw RunError(kExitInternal, qdp_last_error());
  }
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"psd", "simulate", "estimate-psd", "dephasing",
                                             "mc",  "snr",      "sweep",        "optimize"};
  return s;
}

std::string header_text(const RunConfig& cfg, const std::string& command) {
  std::ostringstream os;
  os << "qdephase " << qdp_version() << ' ' << command << '\n';
  os << "spectral convention: " << qdp_spectral_convention() << '\n';
  os << cfg.resolved_ini();
  return os.str();
}

qdp_dephasing closed_reference(const RunConfig& cfg, std::string* route) {
  qdp_dephasing d{};
  if (cfg.noise.coupling == QDP_CORIOLIS) {
    check(qdp_sigma2_residue(&cfg.interferometer, &cfg.noise, &d));
    if (route) *route = "residue";
  } else {
    check(qdp_sigma2_closed(&cfg.interferometer, &cfg.noise, &d));
    if (route) *route = "two_lorentzian";
  }
  return d;
}

nlohmann::ordered_json dephasing_json(const RunConfig& cfg) {
  std::string route;
  const qdp_dephasing closed = closed_reference(cfg, &route);
  qdp_dephasing quad{};
  check(qdp_sigma2_quadrature(&cfg.interferometer, &cfg.noise, cfg.quadrature_rel_tol, &quad));
  auto j = with_meta(cfg, "dephasing");
  j["sigma2_closed"] = closed.sigma2;
  j["closed_form_route"] = route;
  j["sigma2_quadrature"] = quad.sigma2;
  j["quadrature_error_estimate"] = quad.error_estimate;
  j["rel_diff"] = rel_diff(closed.sigma2, quad.sigma2);
  j["term_resonant"] = closed.term_resonant;
  j["term_zero_freq"] = closed.term_zero_freq;
  if (cfg.noise.gamma > 0.0) {
    qdp_dephasing contour{};
    check(qdp_sigma2_contour(&cfg.interferometer, &cfg.noise, &contour));
    j["sigma2_contour"] = contour.sigma2;
    j["term_spectral_poles"] = contour.term_spectral_poles;
    j["rel_diff_contour_quadrature"] = rel_diff(contour.sigma2, quad.sigma2);
  }
  j["dephasing_factor"] = closed.dephasing_factor;
  return j;
}

nlohmann::ordered_json mc_json(const RunConfig& cfg) {
  qdp_sim_config sim = cfg.sim;
  if (!cfg.n_steps_explicit) sim.n_steps = 0;
  if (cfg.burn_in_auto) sim.burn_in = 0;
  qdp_mc_summary s{};
  check(qdp_mc_sigma2(&cfg.interferometer, &cfg.noise, &sim, cfg.realizations, cfg.threads, &s,
                      nullptr));
  const qdp_dephasing closed = closed_reference(cfg);
  auto j = with_meta(cfg, "mc");
  j["n"] = s.n;
  j["mean"] = s.mean;
  j["variance"] = s.variance;
  j["variance_std_error"] = s.variance_std_error;
  j["re_dephasing"] = s.re_dephasing;
  j["im_dephasing"] = s.im_dephasing;
  j["dephasing_std_error"] = s.dephasing_std_error;
  j["excess_kurtosis"] = s.excess_kurtosis;
  j["dephasing_unresolved"] = s.dephasing_unresolved != 0;
  j["sigma2_closed_reference"] = closed.sigma2;
  return j;
}

nlohmann::ordered_json snr_json(const RunConfig& cfg) {
  double phase = 0.0, sigma = 0.0, ratio = 0.0;
  check(qdp_snr(&cfg.interferometer, &cfg.noise, cfg.g, &phase, &sigma, &ratio));
  auto j = with_meta(cfg, "snr");
  j["signal_phase"] = phase;
  j["sigma"] = sigma;
  j["snr"] = ratio;
  return j;
}

nlohmann::ordered_json optimize_json(const RunConfig& cfg) {
  const qdp_variable vary = cfg.optimize_vary == "k"       ? QDP_VARY_K
                            : cfg.optimize_vary == "gamma" ? QDP_VARY_GAMMA
                                                           : QDP_VARY_THETA;
  double argmin = 0.0, min_sigma2 = 0.0;
  int flat = 0;
  check(qdp_optimize(&cfg.interferometer, &cfg.noise, vary, cfg.optimize_lo, cfg.optimize_hi,
                     &argmin, &min_sigma2, &flat));
  auto j = with_meta(cfg, "optimize");
  j["vary"] = cfg.optimize_vary;
  j["argmin"] = argmin;
  j["min_sigma2"] = min_sigma2;
  j["flat_objective"] = flat != 0;
  return j;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg) {
  if (!cfg.sweep.active() || cfg.sweep.points < 2) {
    throw ConfigError("sweep: needs --sweep-param and --sweep-range (or a [sweep] section)");
  }
  const std::vector<double> values = cfg.sweep.values();
  std::vector<RunConfig> points;
  points.reserve(values.size());
  for (double v : values) points.push_back(cfg.with_value(cfg.sweep.param, v));

  std::vector<SweepRow> rows(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        const RunConfig& pc = points[i];
        SweepRow& row = rows[i];
        row.value = values[i];
        if (cfg.sweep.closed) row.closed = closed_reference(pc).sigma2;
        if (cfg.sweep.quadrature) {
          qdp_dephasing d{};
          check(qdp_sigma2_quadrature(&pc.interferometer, &pc.noise, pc.quadrature_rel_tol, &d));
          row.quadrature = d.sigma2;
        }
        if (cfg.sweep.monte_carlo) {
          qdp_sim_config sim = pc.sim;
          if (!pc.n_steps_explicit) sim.n_steps = 0;
          if (pc.burn_in_auto) sim.burn_in = 0;
          qdp_mc_summary s{};
          check(qdp_mc_sigma2(&pc.interferometer, &pc.noise, &sim, pc.realizations, 1, &s,
                              nullptr));
          row.mc = s.variance;
          row.mc_stderr = s.variance_std_error;
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(cfg.threads ? cfg.threads : hw, values.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const RunError& e) {
      throw RunError(e.exit_code(), "sweep point " + cfg.sweep.param + " = " +
                                        format_number(values[i]) + ": " + e.what());
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const RunConfig& cfg, const std::vector<SweepRow>& rows,
                     const std::string& header) {
  std::istringstream hs(header);
  for (std::string line; std::getline(hs, line);) os << "# " << line << '\n';
  const std::string name = cfg.sweep.param.substr(cfg.sweep.param.find('.') + 1);
  os << name;
  if (cfg.sweep.closed) os << ",sigma2_closed";
  if (cfg.sweep.quadrature) os << ",sigma2_quadrature";
  if (cfg.sweep.monte_carlo) os << ",sigma2_mc,sigma2_mc_stderr";
  os << '\n';
  for (const auto& r : rows) {
    os << format_number(r.value);
    if (cfg.sweep.closed) os << ',' << format_number(r.closed);
    if (cfg.sweep.quadrature) os << ',' << format_number(r.quadrature);
    if (cfg.sweep.monte_carlo) os << ',' << format_number(r.mc) << ',' << format_number(r.mc_stderr);
    os << '\n';
  }
}

std::vector<double> psd_grid(const RunConfig& cfg) {
  const double lo = std::log10(cfg.psd_omega_min);
  const double hi = std::log10(cfg.psd_omega_max);
  const auto n = static_cast<std::size_t>(
      std::ceil((hi - lo) * static_cast<double>(cfg.psd_points_per_decade) - 1e-9));
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    grid[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
  }
  grid.front() = cfg.psd_omega_min;
  grid.back() = cfg.psd_omega_max;
  return grid;
}

void run(const std::string& command, const RunConfig& cfg) {
  if (std::find(subcommands().begin(), subcommands().end(), command) == subcommands().end()) {
    throw ConfigError("unknown subcommand '" + command + "'");
  }
  const std::string format = output_format_of(command);
  if (!cfg.output_format.empty() && cfg.output_format != format) {
    throw ConfigError("output.format: subcommand '" + command + "' emits " + format);
  }
  const std::string header = header_text(cfg, command);

  if (command == "psd") {
    const auto grid = psd_grid(cfg);
    check(qdp_analytic_spectrum_write_csv(&cfg.noise, cfg.interferometer.omega0, grid.data(),
                                          grid.size(), out_path(cfg), header.c_str()));
  } else if (command == "simulate") {
    qdp_trajectory* raw = nullptr;
    check(qdp_simulate(&cfg.noise, &cfg.sim, &raw));
    TrajectoryPtr t(raw);
    check(qdp_trajectory_write_csv(t.get(), out_path(cfg), header.c_str()));
  } else if (command == "estimate-psd") {
    if (cfg.input_path.empty()) {
      throw ConfigError("input.trajectory: estimate-psd needs a trajectory CSV (--input)");
    }
    qdp_trajectory* raw = nullptr;
    check(qdp_trajectory_read_csv(cfg.input_path.c_str(), &raw));
    TrajectoryPtr t(raw);
    if (qdp_trajectory_size(t.get()) >= 2) {
      const double* time = qdp_trajectory_column(t.get(), QDP_COL_T);
      const double spacing = time[1] - time[0];
      if (std::abs(spacing - cfg.sim.dt) > 1e-9 * cfg.sim.dt) {
        throw ConfigError("sim.dt: " + format_number(cfg.sim.dt) +
                          " does not match the trajectory sample spacing " +
                          format_number(spacing));
      }
    }
    qdp_spectrum* sraw = nullptr;
    check(qdp_estimate_noise_spectra(t.get(), cfg.sim.dt, &cfg.welch, &sraw));
    SpectrumPtr s(sraw);
    check(qdp_spectrum_write_csv(s.get(), out_path(cfg), header.c_str()));
  } else if (command == "sweep") {
    const auto rows = run_sweep(cfg);
    std::ostringstream os;
    write_sweep_csv(os, cfg, rows, header);
    emit_text(cfg, os.str());
  } else {
    nlohmann::ordered_json j;
    if (command == "dephasing") j = dephasing_json(cfg);
    else if (command == "mc") j = mc_json(cfg);
    else if (command == "snr") j = snr_json(cfg);
    else j = optimize_json(cfg);
    emit_text(cfg, j.dump(2) + "\n");
  }
}

nlohmann::ordered_json error_json(int exit_code, const std::string& message, int line) {
  const char* kind = exit_code == kExitConfig      ? "config"
                     : exit_code == kExitNumerical ? "numerical"
                     : exit_code == kExitIo        ? "io"
                                                   : "internal";
  nlohmann::ordered_json j;
  j["error"]["kind"] = kind;
  j["error"]["exit_code"] = exit_code;
  j["error"]["message"] = message;
  if (line > 0) j["error"]["line"] = line;
  return j;
}

}  // namespace qdcli
