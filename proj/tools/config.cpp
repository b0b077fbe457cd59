#include "config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace qdcli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"interferometer", {"units", "omega0", "theta", "amplitude", "mass", "coupling", "hbar"}},
      {"noise", {"variant", "Omega0", "gamma", "k", "Omega_r", "S0"}},
      {"sim", {"dt", "n_steps", "burn_in", "seed", "record_noise"}},
      {"welch", {"segments", "overlap", "window"}},
      {"mc", {"realizations", "threads"}},
      {"output", {"path", "format"}},
      {"input", {"trajectory"}},
      {"gravimeter", {"g"}},
      {"psd", {"omega_min", "omega_max", "points_per_decade"}},
      {"quadrature", {"rel_tol"}},
      {"optimize", {"vary", "lo", "hi"}},
      {"sweep", {"param", "range", "methods"}},
  };
  return s;
}

const std::set<std::string>& numeric_keys() {
  static const std::set<std::string> s = {
      "interferometer.omega0", "interferometer.theta", "interferometer.amplitude",
      "interferometer.mass",   "interferometer.coupling", "interferometer.hbar",
      "noise.Omega0",          "noise.gamma",          "noise.k",
      "noise.Omega_r",         "noise.S0",             "gravimeter.g",
      "sim.dt",
  };
  return s;
}

// Line of `section.key` in the original text, for error messages.
int find_line(std::string_view text, const std::string& section, const std::string& key) {
  std::istringstream is{std::string(text)};
  std::string line, current;
  int n = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
      if (key.empty() && current == section) return n;
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos && current == section && trim(t.substr(0, eq)) == key) return n;
  }
  return 0;
}

struct Reader {
  const pt::ptree& tree;
  std::string_view text;

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return *v;
  }

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& msg) const {
    throw ConfigError(section + "." + key + ": " + msg, find_line(text, section, key));
  }

  double number(const std::string& section, const std::string& key, double fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    double out = 0.0;
    std::string_view s = *v;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      fail(section, key, "expected a number, got '" + *v + "'");
    }
    if (!std::isfinite(out)) fail(section, key, "must be finite");
    return out;
  }

  std::uint64_t integer(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    const auto r = std::from_chars(v->data(), v->data() + v->size(), out);
    if (v->empty() || r.ec != std::errc() || r.ptr != v->data() + v->size()) {
      fail(section, key, "expected a non-negative integer, got '" + *v + "'");
    }
    return out;
  }

  std::string text_value(const std::string& section, const std::string& key,
                         const std::string& fallback, const std::set<std::string>& allowed) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    if (!allowed.empty() && !allowed.count(*v)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(section, key, "must be one of {" + list + "}, got '" + *v + "'");
    }
    return *v;
  }

  bool flag(const std::string& section, const std::string& key, bool fallback) const {
    const auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    fail(section, key, "expected true or false, got '" + *v + "'");
  }

  bool has(const std::string& section, const std::string& key) const {
    return raw(section, key).has_value();
  }
};

void check_schema(const pt::ptree& tree, std::string_view text) {
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (!body.data().empty() && body.empty()) {
      throw ConfigError("'" + section + "': key outside any section",
                        find_line(text, "", section));
    }
    if (it == schema().end()) {
      throw ConfigError("[" + section + "]: unknown section", find_line(text, section, ""));
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) {
        throw ConfigError(section + "." + key + ": unknown key", find_line(text, section, key));
      }
      if (!value.empty()) {
        throw ConfigError(section + "." + key + ": nested value", find_line(text, section, key));
      }
    }
  }
}

// Runs a C API validator and rethrows its message as a config error.
void expect_ok(qdp_status s, std::string_view text) {
  if (s == QDP_OK) return;
  std::string msg = qdp_last_error();
  int line = 0;
  const auto dot = msg.find('.');
  const auto colon = msg.find(':');
  if (dot != std::string::npos && colon != std::string::npos && dot < colon) {
    line = find_line(text, msg.substr(0, dot), msg.substr(dot + 1, colon - dot - 1));
  }
  throw ConfigError(msg, line);
}

void parse_methods(const std::string& list, SweepSpec& spec) {
  spec.closed = spec.quadrature = spec.monte_carlo = false;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    item = b == std::string::npos ? "" : item.substr(b, e - b + 1);
    if (item == "closed") spec.closed = true;
    else if (item == "quadrature") spec.quadrature = true;
    else if (item == "mc") spec.monte_carlo = true;
    else throw ConfigError("sweep.methods: unknown method '" + item +
                           "' (expected closed, quadrature, mc)");
  }
  if (!spec.closed && !spec.quadrature && !spec.monte_carlo) {
    throw ConfigError("sweep.methods: at least one method required");
  }
}

RunConfig build(const pt::ptree& tree, std::string_view text) {
  check_schema(tree, text);
  const Reader r{tree, text};
  RunConfig c;
  c.raw = tree;

  c.units = r.text_value("interferometer", "units", "normalized", {"normalized", "si"});
  const double omega0 = r.number("interferometer", "omega0", 1.0);
  const double theta = r.number("interferometer", "theta", 0.0);
  if (c.units == "normalized") {
    for (const char* key : {"mass", "coupling", "hbar"}) {
      if (r.has("interferometer", key)) r.fail("interferometer", key, "only valid with units = si");
    }
    c.amplitude = r.number("interferometer", "amplitude", 1.0);
    if (!(omega0 > 0.0)) r.fail("interferometer", "omega0", "must be > 0");
    if (!(c.amplitude >= 0.0)) r.fail("interferometer", "amplitude", "must be >= 0");
    expect_ok(qdp_interferometer_normalized(omega0, c.amplitude, theta, &c.interferometer), text);
  } else {
    if (r.has("interferometer", "amplitude")) {
      r.fail("interferometer", "amplitude", "not valid with units = si; give mass and coupling");
    }
    for (const char* key : {"mass", "coupling"}) {
      if (!r.has("interferometer", key)) r.fail("interferometer", key, "required with units = si");
    }
    c.interferometer.mass = r.number("interferometer", "mass", 0.0);
    c.interferometer.coupling = r.number("interferometer", "coupling", 0.0);
    c.interferometer.hbar = r.number("interferometer", "hbar", 1.054571817e-34);
    c.interferometer.omega0 = omega0;
    c.interferometer.theta = theta;
    expect_ok(qdp_validate_interferometer(&c.interferometer), text);
    expect_ok(qdp_interferometer_amplitude(&c.interferometer, &c.amplitude), text);
  }

  const std::string variant =
      r.text_value("noise", "variant", "direct", {"uncoupled", "direct", "coriolis"});
  c.noise.apparatus_omega = r.number("noise", "Omega0", 1.0);
  c.noise.gamma = r.number("noise", "gamma", 0.1);
  c.noise.s0 = r.number("noise", "S0", 1.0);
  if (variant == "coriolis") {
    if (r.has("noise", "k")) r.fail("noise", "k", "not valid with variant = coriolis");
    c.noise.coupling = QDP_CORIOLIS;
    c.noise.coriolis_rate = r.number("noise", "Omega_r", 0.0);
  } else {
    if (r.has("noise", "Omega_r")) {
      r.fail("noise", "Omega_r", "only valid with variant = coriolis");
    }
    if (variant == "uncoupled" && r.has("noise", "k")) {
      r.fail("noise", "k", "not valid with variant = uncoupled");
    }
    c.noise.coupling = variant == "uncoupled" ? QDP_UNCOUPLED : QDP_DIRECT;
    c.noise.k = r.number("noise", "k", 0.0);
  }
  expect_ok(qdp_validate_noise(&c.noise), text);

  qdp_sim_config_default(&c.sim);
  c.sim.dt = r.number("sim", "dt", c.sim.dt);
  c.n_steps_explicit = r.has("sim", "n_steps");
  c.sim.n_steps = r.integer("sim", "n_steps", std::uint64_t{1} << 18);
  c.sim.seed = r.integer("sim", "seed", 1);
  c.sim.record_noise = r.flag("sim", "record_noise", false) ? 1 : 0;
  const auto burn = r.raw("sim", "burn_in");
  c.burn_in_auto = !burn || *burn == "auto";
  c.sim.burn_in = c.burn_in_auto ? qdp_default_burn_in(&c.noise, c.sim.dt, c.sim.n_steps)
                                 : r.integer("sim", "burn_in", 0);
  expect_ok(qdp_validate_sim(&c.noise, &c.sim), text);

  qdp_welch_config_default(&c.welch);
  const auto segments = r.integer("welch", "segments", c.welch.n_segments);
  if (segments < 1 || segments > 1u << 20) r.fail("welch", "segments", "must be in [1, 2^20]");
  c.welch.n_segments = static_cast<std::uint32_t>(segments);
  c.welch.overlap = r.number("welch", "overlap", c.welch.overlap);
  c.welch.window = r.text_value("welch", "window", "hann", {"hann", "rectangular"}) == "hann"
                       ? QDP_WINDOW_HANN
                       : QDP_WINDOW_RECTANGULAR;
  expect_ok(qdp_validate_welch(&c.welch), text);

  c.realizations = r.integer("mc", "realizations", 500);
  if (c.realizations < 2) r.fail("mc", "realizations", "must be >= 2");
  const auto threads = r.integer("mc", "threads", 0);
  if (threads > 1024) r.fail("mc", "threads", "must be <= 1024");
  c.threads = static_cast<unsigned>(threads);

  c.output_path = r.text_value("output", "path", "", {});
  c.output_format = r.text_value("output", "format", "", {"csv", "json"});
  c.input_path = r.text_value("input", "trajectory", "", {});
  c.g = r.number("gravimeter", "g", 9.81);

  const double big = c.noise.apparatus_omega;
  c.psd_omega_min = r.number("psd", "omega_min", 1e-2 * big);
  c.psd_omega_max = r.number("psd", "omega_max", 1e2 * big);
  if (!(c.psd_omega_min > 0.0)) r.fail("psd", "omega_min", "must be > 0");
  if (!(c.psd_omega_max > c.psd_omega_min)) r.fail("psd", "omega_max", "must be > psd.omega_min");
  c.psd_points_per_decade = r.integer("psd", "points_per_decade", 200);
  if (c.psd_points_per_decade < 1 || c.psd_points_per_decade > 100000) {
    r.fail("psd", "points_per_decade", "must be in [1, 100000]");
  }

  c.quadrature_rel_tol = r.number("quadrature", "rel_tol", 1e-9);
  if (!(c.quadrature_rel_tol > 0.0 && c.quadrature_rel_tol < 1.0)) {
    r.fail("quadrature", "rel_tol", "must be in (0, 1)");
  }

  c.optimize_vary = r.text_value("optimize", "vary", "theta", {"theta", "k", "gamma"});
  const double om2 = big * big;
  double lo = 0.0, hi = std::numbers::pi;
  if (c.optimize_vary == "k") {
    lo = -0.99 * om2;
    hi = 0.99 * om2;
  } else if (c.optimize_vary == "gamma") {
    lo = 1e-3 * big;
    hi = 2.0 * big;
  }
  c.optimize_lo = r.number("optimize", "lo", lo);
  c.optimize_hi = r.number("optimize", "hi", hi);
  if (!(c.optimize_hi > c.optimize_lo)) r.fail("optimize", "hi", "must be > optimize.lo");

  if (const auto p = r.raw("sweep", "param")) c.sweep.param = resolve_sweep_param(*p);
  if (const auto range = r.raw("sweep", "range")) {
    try {
      parse_sweep_range(*range, c.sweep);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), find_line(text, "sweep", "range"));
    }
  }
  if (const auto m = r.raw("sweep", "methods")) parse_methods(*m, c.sweep);
  return c;
}

void apply_override(pt::ptree& tree, const std::string& item) {
  const auto eq = item.find('=');
  const auto dot = item.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    throw ConfigError("--set '" + item + "': expected section.key=value");
  }
  const std::string section = item.substr(0, dot);
  const std::string key = item.substr(dot + 1, eq - dot - 1);
  const std::string value = item.substr(eq + 1);
  if (section.empty() || key.empty()) {
    throw ConfigError("--set '" + item + "': expected section.key=value");
  }
  auto sec = tree.get_child_optional(pt::ptree::path_type(section, '\0'));
  if (!sec) {
    tree.push_back({section, pt::ptree()});
    sec = tree.get_child_optional(pt::ptree::path_type(section, '\0'));
  }
  sec->put(pt::ptree::path_type(key, '\0'), value);
}

}  // namespace

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::vector<double> SweepSpec::values() const {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    out[i] = log_spacing ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                         : start + f * (stop - start);
  }
  if (points >= 2) {
    out.front() = start;
    out.back() = stop;
  }
  return out;
}

void parse_sweep_range(std::string_view text, SweepSpec& spec) {
  std::vector<std::string> parts;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3 && parts.size() != 4) {
    throw ConfigError("sweep.range: expected a:b:n[:log], got '" + std::string(text) + "'");
  }
  auto num = [&](const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ConfigError("sweep.range: '" + s + "' is not a number");
    }
    return v;
  };
  spec.start = num(parts[0]);
  spec.stop = num(parts[1]);
  std::size_t n = 0;
  const auto r = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), n);
  if (parts[2].empty() || r.ec != std::errc() || r.ptr != parts[2].data() + parts[2].size()) {
    throw ConfigError("sweep.range: point count '" + parts[2] + "' is not an integer");
  }
  if (n < 2) throw ConfigError("sweep.range: points must be >= 2");
  spec.points = n;
  spec.log_spacing = false;
  if (parts.size() == 4) {
    if (parts[3] == "log") spec.log_spacing = true;
    else if (parts[3] != "lin" && parts[3] != "linear") {
      throw ConfigError("sweep.range: spacing must be 'log' or 'lin', got '" + parts[3] + "'");
    }
  }
  if (spec.log_spacing && !(spec.start > 0.0 && spec.stop > 0.0)) {
    throw ConfigError("sweep.range: log spacing needs positive endpoints");
  }
}

std::string resolve_sweep_param(std::string_view name) {
  const std::string n(name);
  if (numeric_keys().count(n)) return n;
  std::string found;
  for (const auto& key : numeric_keys()) {
    if (key.substr(key.find('.') + 1) == n) {
      if (!found.empty()) throw ConfigError("sweep.param: '" + n + "' is ambiguous");
      found = key;
    }
  }
  if (found.empty()) throw ConfigError("sweep.param: '" + n + "' is not a numeric parameter");
  return found;
}

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  std::istringstream is{std::string(text)};
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config parse error: " + e.message(), static_cast<int>(e.line()));
  }
  for (const auto& o : overrides) apply_override(tree, o);
  return build(tree, text);
}

RunConfig RunConfig::with_value(const std::string& key, double value) const {
  if (!numeric_keys().count(key)) throw ConfigError(key + ": not a numeric parameter");
  pt::ptree tree = raw;
  apply_override(tree, key + "=" + format_number(value));
  return build(tree, "");
}

std::string RunConfig::resolved_ini() const {
  std::ostringstream os;
  const auto j = resolved_json();
  bool first = true;
  for (const auto& [section, body] : j.items()) {
    os << (first ? "" : "\n") << '[' << section << "]\n";
    first = false;
    for (const auto& [key, value] : body.items()) {
      os << key << " = " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
  }
  return os.str();
}

nlohmann::ordered_json RunConfig::resolved_json() const {
  nlohmann::ordered_json j;
  auto num = [](double v) { return format_number(v); };
  auto& in = j["interferometer"];
  in["units"] = units;
  in["omega0"] = num(interferometer.omega0);
  in["theta"] = num(interferometer.theta);
  in["amplitude"] = num(amplitude);
  in["mass"] = num(interferometer.mass);
  in["coupling"] = num(interferometer.coupling);
  in["hbar"] = num(interferometer.hbar);
  auto& no = j["noise"];
  no["variant"] = noise.coupling == QDP_CORIOLIS ? "coriolis"
                  : noise.coupling == QDP_UNCOUPLED ? "uncoupled"
                                                    : "direct";
  no["Omega0"] = num(noise.apparatus_omega);
  no["gamma"] = num(noise.gamma);
  if (noise.coupling == QDP_CORIOLIS) no["Omega_r"] = num(noise.coriolis_rate);
  else no["k"] = num(noise.k);
  no["S0"] = num(noise.s0);
  auto& si = j["sim"];
  si["dt"] = num(sim.dt);
  si["n_steps"] = std::to_string(sim.n_steps);
  si["burn_in"] = std::to_string(sim.burn_in);
  si["seed"] = std::to_string(sim.seed);
  si["record_noise"] = sim.record_noise ? "true" : "false";
  auto& we = j["welch"];
  we["segments"] = std::to_string(welch.n_segments);
  we["overlap"] = num(welch.overlap);
  we["window"] = welch.window == QDP_WINDOW_HANN ? "hann" : "rectangular";
  auto& mc = j["mc"];
  mc["realizations"] = std::to_string(realizations);
  mc["threads"] = std::to_string(threads);
  j["gravimeter"]["g"] = num(g);
  auto& ps = j["psd"];
  ps["omega_min"] = num(psd_omega_min);
  ps["omega_max"] = num(psd_omega_max);
  ps["points_per_decade"] = std::to_string(psd_points_per_decade);
  j["quadrature"]["rel_tol"] = num(quadrature_rel_tol);
  auto& op = j["optimize"];
  op["vary"] = optimize_vary;
  op["lo"] = num(optimize_lo);
  op["hi"] = num(optimize_hi);
  if (sweep.active()) {
    auto& sw = j["sweep"];
    sw["param"] = sweep.param;
    sw["range"] = num(sweep.start) + ":" + num(sweep.stop) + ":" + std::to_string(sweep.points) +
                  (sweep.log_spacing ? ":log" : "");
    std::string m;
    if (sweep.closed) m += "closed";
    if (sweep.quadrature) m += std::string(m.empty() ? "" : ",") + "quadrature";
    if (sweep.monte_carlo) m += std::string(m.empty() ? "" : ",") + "mc";
    sw["methods"] = m;
  }
  if (!input_path.empty()) j["input"]["trajectory"] = input_path;
  if (!output_path.empty() || !output_format.empty()) {
    j["output"]["path"] = output_path;
    j["output"]["format"] = output_format;
  }
  return j;
}

}  // namespace qdcli
