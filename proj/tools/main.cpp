#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

int report(int code, const std::string& message, int line = 0) {
  std::cerr << qdcli::error_json(code, message, line).dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dephasing of a qubit-driven 2D interferometer under correlated inertial noise"};
  app.set_version_flag("--version", std::string(qdp_version()));

  std::string command;
  std::string config_path;
  std::string out_path;
  std::string input_path;
  std::string sweep_param;
  std::string sweep_range;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  std::uint64_t realizations = 0;

  app.add_option("command", command, "Subcommand")
      ->required()
      ->check(CLI::IsMember(qdcli::subcommands()));
  app.add_option("--config", config_path, "INI configuration file");
  auto* out_opt = app.add_option("--out", out_path, "Output file (default stdout)");
  auto* in_opt = app.add_option("--input", input_path, "Trajectory CSV for estimate-psd");
  auto* seed_opt = app.add_option("--seed", seed, "Master RNG seed");
  auto* param_opt = app.add_option("--sweep-param", sweep_param, "Parameter to sweep");
  auto* range_opt = app.add_option("--sweep-range", sweep_range, "a:b:n[:log]");
  auto* real_opt = app.add_option("--realizations", realizations, "Monte-Carlo realizations");
  app.add_option("--set", sets, "Override section.key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(qdcli::kExitConfig, e.what());
  }

  std::string text;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) return report(qdcli::kExitIo, "cannot open config '" + config_path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    text = ss.str();
  }

  std::vector<std::string> overrides = sets;
  if (*seed_opt) overrides.push_back("sim.seed=" + std::to_string(seed));
  if (*real_opt) overrides.push_back("mc.realizations=" + std::to_string(realizations));
  if (*out_opt) overrides.push_back("output.path=" + out_path);
  if (*in_opt) overrides.push_back("input.trajectory=" + input_path);
  if (*param_opt) overrides.push_back("sweep.param=" + sweep_param);
  if (*range_opt) overrides.push_back("sweep.range=" + sweep_range);

  try {
    const qdcli::RunConfig cfg = qdcli::parse_config(text, overrides);
    qdcli::run(command, cfg);
  } catch (const qdcli::ConfigError& e) {
    return report(qdcli::kExitConfig, e.what(), e.line());
  } catch (const qdcli::RunError& e) {
    return report(e.exit_code(), e.what());
  } catch (const std::exception& e) {
    return report(qdcli::kExitInternal, e.what());
  }
  return qdcli::kExitOk;
}
