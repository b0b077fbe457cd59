#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace qdcli {

enum ExitCode { kExitOk = 0, kExitInternal = 1, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

/// Failure reported by the library, tagged with the process exit code.
class RunError : public std::runtime_error {
 public:
  RunError(int exit_code, const std::string& what)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// Throws RunError for anything but QDP_OK.
void check(qdp_status s);

const std::vector<std::string>& subcommands();

/// Comment header (without '#' prefixes): tool version, command, resolved
/// config.
std::string header_text(const RunConfig& cfg, const std::string& command);

/// sigma2 by the closed form for direct coupling, by the residue form for
/// Coriolis.
qdp_dephasing closed_reference(const RunConfig& cfg, std::string* route = nullptr);

nlohmann::ordered_json dephasing_json(const RunConfig& cfg);
nlohmann::ordered_json mc_json(const RunConfig& cfg);
nlohmann::ordered_json snr_json(const RunConfig& cfg);
nlohmann::ordered_json optimize_json(const RunConfig& cfg);

struct SweepRow {
  double value = 0.0;
  double closed = 0.0;
  double quadrature = 0.0;
  double mc = 0.0;
  double mc_stderr = 0.0;
};

/// One row per sweep point; points run concurrently.
std::vector<SweepRow> run_sweep(const RunConfig& cfg);
void write_sweep_csv(std::ostream& os, const RunConfig& cfg, const std::vector<SweepRow>& rows,
                     const std::string& header);

/// Log-spaced psd grid from the [psd] section.
std::vector<double> psd_grid(const RunConfig& cfg);

/// Executes a subcommand, writing to cfg.output_path or stdout.
void run(const std::string& command, const RunConfig& cfg);

/// {"error": {...}} document for stderr.
nlohmann::ordered_json error_json(int exit_code, const std::string& message, int line = 0);

}  // namespace qdcli
