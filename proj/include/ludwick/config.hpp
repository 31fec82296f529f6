// Actuator run configuration: flat key=value text. Angles are degrees here
// and converted to radians exactly once, at parse time.
//
//   M=<kg>  C=<val>            required
//   K=<val>  |  E_mpa= I_m4= L0_m=   exactly one stiffness group
//   n=<val>  |  estimate_n=true      exactly one power source; estimating
//                                    needs the E_mpa group plus mv_cps and
//                                    ts_mpa (predictors of the fitted model,
//                                    trained on the bundled database)
//   eta=, delta_n=, F=, dt=, t_end=, theta0_deg=, omega0_degps=   optional
#pragma once

#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ludwick/dynamics.hpp"
#include "ludwick/regress.hpp"

namespace ludwick {

struct SimulationSetup {
  ActuatorParams params;
  double force = 0.0;
  double dt = kDefaultTimeStep;
  double t_end = 10.0;
  double theta0 = 0.0;  // rad
  double omega0 = 0.0;  // rad/s
};

namespace detail {

inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": duplicate key '" +
                                  key + "'");
  }
  return kv;
}

}  // namespace detail

inline SimulationSetup parse_actuator_config(std::istream& in) {
  static const std::set<std::string> known = {
      "M", "C", "K", "E_mpa", "I_m4", "L0_m", "n", "estimate_n", "mv_cps", "ts_mpa",
      "eta", "delta_n", "F", "dt", "t_end", "theta0_deg", "omega0_degps"};

  const auto kv = detail::parse_key_values(in);
  for (const auto& [key, value] : kv)
    if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");

  const auto number = [&](const std::string& key) -> std::optional<double> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return detail::parse_double(it->second, "config key '" + key + "'");
  };
  const auto required = [&](const std::string& key) {
    const auto v = number(key);
    if (!v) throw std::invalid_argument("config: missing required key '" + key + "'");
    return *v;
  };

  SimulationSetup setup;
  setup.params.mass = required("M");
  setup.params.damping = required("C");

  // exactly one stiffness group
  const bool has_k = kv.count("K") > 0;
  const bool has_beam = kv.count("E_mpa") || kv.count("I_m4") || kv.count("L0_m");
  if (has_k && has_beam)
    throw std::invalid_argument("config: give either K or the E_mpa/I_m4/L0_m group, not both");
  if (!has_k && !has_beam)
    throw std::invalid_argument("config: missing required key 'K' (or the E_mpa/I_m4/L0_m group)");
  if (has_k) {
    setup.params.spring_k = required("K");
  } else {
    setup.params.spring_k = spring_constant(required("E_mpa"), required("I_m4"), required("L0_m"));
  }

  // exactly one power source
  const auto estimate_it = kv.find("estimate_n");
  bool estimate = false;
  if (estimate_it != kv.end()) {
    if (estimate_it->second == "true") estimate = true;
    else if (estimate_it->second == "false") estimate = false;
    else throw std::invalid_argument("config: estimate_n must be 'true' or 'false'");
  }
  const bool has_n = kv.count("n") > 0;
  if (has_n && estimate)
    throw std::invalid_argument("config: give either n or estimate_n=true, not both");
  if (!has_n && !estimate)
    throw std::invalid_argument("config: missing required key 'n' (or estimate_n=true)");
  if (!estimate && (kv.count("mv_cps") || kv.count("ts_mpa")))
    throw std::invalid_argument("config: mv_cps/ts_mpa are only meaningful with estimate_n=true");
  if (estimate) {
    if (has_k)
      throw std::invalid_argument(
          "config: estimate_n=true needs the E_mpa/I_m4/L0_m group (E is a predictor)");
    MaterialRecord m;
    m.name = "config material";
    m.youngs_modulus = required("E_mpa");
    m.mixed_viscosity = required("mv_cps");
    m.tensile_strength = required("ts_mpa");
    std::vector<MaterialRecord> training;
    for (const auto& rec : builtin_materials())
      if (rec.fractional_power) training.push_back(rec);
    setup.params.power = predict_n(fit_model(training), m);
  } else {
    setup.params.power = required("n");
  }

  setup.params.eta = number("eta");
  setup.params.delta_n = number("delta_n").value_or(0.0);
  setup.force = number("F").value_or(0.0);
  setup.dt = number("dt").value_or(kDefaultTimeStep);
  setup.t_end = number("t_end").value_or(10.0);
  constexpr double rad = std::numbers::pi / 180.0;
  setup.theta0 = number("theta0_deg").value_or(0.0) * rad;
  setup.omega0 = number("omega0_degps").value_or(0.0) * rad;

  validate(setup.params);
  if (!(setup.dt > 0.0)) throw std::invalid_argument("config: dt must be > 0");
  if (!(setup.t_end > 0.0)) throw std::invalid_argument("config: t_end must be > 0");
  if (!(setup.theta0 >= 0.0 && setup.theta0 <= std::numbers::pi))
    throw std::invalid_argument("config: theta0_deg must lie in [0, 180]");
  return setup;
}

// One-line record of every resolved parameter, suitable for the trajectory
// CSV comment. Deterministic formatting.
inline std::string resolved_comment(const SimulationSetup& s) {
  using detail::format_double;
  constexpr double deg = 180.0 / std::numbers::pi;
  std::string out = "M=" + format_double(s.params.mass) + " C=" + format_double(s.params.damping) +
                    " K=" + format_double(s.params.spring_k) + " n=" + format_double(s.params.power);
  if (s.params.eta) out += " eta=" + format_double(*s.params.eta);
  out += " delta_n=" + format_double(s.params.delta_n) + " F=" + format_double(s.force) +
         " dt=" + format_double(s.dt) + " t_end=" + format_double(s.t_end) +
         " theta0_deg=" + format_double(s.theta0 * deg) +
         " omega0_degps=" + format_double(s.omega0 * deg);
  return out;
}

}  // namespace ludwick
