#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "json.hpp"
#include "qdephase/qdephase.h"

namespace qdcli {

/// Bad configuration or command line. line is 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct SweepSpec {
  std::string param;  // "section.key"
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 0;
  bool log_spacing = false;
  bool closed = true;
  bool quadrature = true;
  bool monte_carlo = false;

  bool active() const { return !param.empty(); }
  std::vector<double> values() const;
};

struct RunConfig {
  std::string units = "normalized";
  double amplitude = 1.0;
  qdp_interferometer interferometer{};
  qdp_noise noise{};
  qdp_sim_config sim{};
  bool burn_in_auto = true;
  bool n_steps_explicit = false;
  qdp_welch_config welch{};
  std::size_t realizations = 500;
  unsigned threads = 0;
  double g = 9.81;
  std::string output_path;
  std::string output_format;
  std::string input_path;
  double psd_omega_min = 0.0;  // resolved against Omega0
  double psd_omega_max = 0.0;
  std::size_t psd_points_per_decade = 200;
  double quadrature_rel_tol = 1e-9;
  std::string optimize_vary = "theta";
  double optimize_lo = 0.0;
  double optimize_hi = 0.0;
  SweepSpec sweep;

  /// Raw tree after overrides; kept so sweeps can re-validate per point.
  boost::property_tree::ptree raw;

  /// Every key with its resolved value, in INI form.
  std::string resolved_ini() const;
  nlohmann::ordered_json resolved_json() const;

  /// Copy with one numeric key replaced and fully re-validated.
  RunConfig with_value(const std::string& key, double value) const;
};

/// Parses INI text. `overrides` are "section.key=value" strings applied on
/// top of the file. Unknown sections and keys are errors.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

/// "a:b:n" or "a:b:n:log".
void parse_sweep_range(std::string_view text, SweepSpec& spec);

/// Accepts "section.key" or a bare key that names a numeric field.
std::string resolve_sweep_param(std::string_view name);

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace qdcli
