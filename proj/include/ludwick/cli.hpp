// Command-line front end: estimate-n, fit-n, simulate, compare, materials.
// Every command validates and computes fully before its output file is
// created, so a failing run leaves no partial artifact.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ludwick/config.hpp"
#include "ludwick/harness.hpp"
#include "ludwick/regress.hpp"

namespace ludwick::cli {

// exit codes
inline constexpr int kOk = 0;
inline constexpr int kValidationError = 1;
inline constexpr int kNumericalError = 2;

namespace detail {

inline std::ifstream open_input(const std::string& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(what + ": cannot open '" + path + "'");
  return in;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot create output file '" + path + "'");
  out << content;
  if (!out) throw std::invalid_argument("failed writing output file '" + path + "'");
}

}  // namespace detail

struct EstimateRow {
  std::string name;
  std::optional<double> true_power;
  double predicted = 0.0;
};

// Fits on the database records outside the holdout set (those must carry a
// known power) and predicts for the holdout rows. An empty holdout degrades
// to an in-sample fit over every record with a known power, predicting all.
inline std::vector<EstimateRow> estimate_n(const std::vector<MaterialRecord>& db,
                                           const std::vector<std::string>& holdout,
                                           PowerLawModel* fitted = nullptr) {
  for (const auto& name : holdout) {
    const bool found = std::any_of(db.begin(), db.end(),
                                   [&](const MaterialRecord& m) { return m.name == name; });
    if (!found) throw std::invalid_argument("unknown material in holdout: '" + name + "'");
  }
  const auto held = [&](const MaterialRecord& m) {
    return std::find(holdout.begin(), holdout.end(), m.name) != holdout.end();
  };

  std::vector<MaterialRecord> training;
  for (const auto& m : db)
    if (!held(m) && m.fractional_power) training.push_back(m);
  const PowerLawModel model = fit_model(training);
  if (fitted) *fitted = model;

  std::vector<EstimateRow> rows;
  for (const auto& m : db) {
    if (!holdout.empty() && !held(m)) continue;
    rows.push_back({m.name, m.fractional_power, predict_n(model, m)});
  }
  return rows;
}

inline int run_estimate_n(const std::string& db_path, const std::vector<std::string>& holdout,
                          std::ostream& out) {
  std::vector<MaterialRecord> db;
  if (db_path.empty()) {
    db = builtin_materials();
  } else {
    auto in = detail::open_input(db_path, "material database");
    db = read_materials_csv(in);
  }
  PowerLawModel model;
  const auto rows = estimate_n(db, holdout, &model);

  std::ostringstream body;
  body << "# model " << to_string(model) << '\n';
  body << "name,true_n,predicted_n,residual\n";
  for (const auto& row : rows) {
    body << row.name << ',';
    if (row.true_power) body << ludwick::detail::format_double(*row.true_power);
    body << ',' << ludwick::detail::format_double(row.predicted) << ',';
    if (row.true_power)
      body << ludwick::detail::format_double(row.predicted - *row.true_power);
    body << '\n';
  }
  out << body.str();
  return kOk;
}

inline int run_fit_n(const std::string& curve_path, double youngs_modulus_mpa, std::ostream& out) {
  auto in = detail::open_input(curve_path, "stress-strain curve");
  const auto samples = read_strain_samples_csv(in);
  const double n = fit_n_from_curve(samples, youngs_modulus_mpa);
  out << "n=" << ludwick::detail::format_double(n) << '\n';
  return kOk;
}

inline int run_simulate(const std::string& config_path, const std::string& out_path, bool linear) {
  auto in = detail::open_input(config_path, "actuator config");
  SimulationSetup setup = parse_actuator_config(in);
  if (linear) {
    // resolve before recording, so n=1 configs and --linear agree byte for byte
    setup.params.power = 1.0;
    setup.params.eta.reset();
    setup.params.delta_n = 0.0;
  }
  const Trajectory traj = (linear ? linear_step_response : step_response)(
      setup.params, setup.force, setup.t_end, setup.dt, setup.theta0, setup.omega0);

  std::ostringstream body;
  write_trajectory_csv(body, traj, resolved_comment(setup));
  detail::write_file(out_path, body.str());
  return kOk;
}

inline int run_compare(const std::string& config_path, const std::string& traces_dir,
                       const std::string& out_path) {
  auto in = detail::open_input(config_path, "actuator config");
  const SimulationSetup setup = parse_actuator_config(in);

  namespace fs = std::filesystem;
  if (!fs::is_directory(traces_dir))
    throw std::invalid_argument("traces: '" + traces_dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(traces_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::invalid_argument("traces: no .csv files in '" + traces_dir + "'");

  std::vector<MeasuredTrace> traces;
  for (const auto& path : files) {
    auto trace_in = detail::open_input(path.string(), "trace");
    try {
      traces.push_back(read_trace_csv(trace_in));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("trace '" + path.string() + "': " + e.what());
    }
  }

  const ComparisonReport report = compare(setup.params, setup.force, traces);
  detail::write_file(out_path, report_to_json(report));
  return kOk;
}

inline int run_materials(std::ostream& out) {
  out << kBuiltinMaterialsCsv;
  return kOk;
}

inline std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> names;
  std::string::size_type start = 0;
  while (start <= csv.size()) {
    const auto pos = csv.find(',', start);
    const auto piece = ludwick::detail::trim(
        csv.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (!piece.empty()) names.push_back(piece);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return names;
}

// argv entry point. Exit codes: 0 success, 1 validation error, 2 numerical.
inline int run(int argc, const char* const* argv) {
  CLI::App app{"Soft pneumatic actuator modeling with a power-law stress-strain relation"};
  app.require_subcommand(1);

  std::string db_path, holdout_csv, curve_path, config_path, out_path, traces_dir;
  double e_mpa = 0.0;
  bool linear = false;

  auto* estimate = app.add_subcommand(
      "estimate-n", "Fit the property-based power predictor and report predictions");
  estimate->add_option("--db", db_path, "material database CSV (default: bundled database)");
  estimate->add_option("--holdout", holdout_csv,
                       "comma-separated material names to hold out (default: none, in-sample)");

  auto* fitn = app.add_subcommand("fit-n", "Fit the power from a stress-strain sample CSV");
  fitn->add_option("--curve", curve_path, "CSV with header strain,stress_mpa")->required();
  fitn->add_option("--e", e_mpa, "Young's modulus in MPa")->required();

  auto* simulate = app.add_subcommand("simulate", "Integrate a step response to a trajectory CSV");
  simulate->add_option("--config", config_path, "actuator config file")->required();
  simulate->add_option("--out", out_path, "output trajectory CSV")->required();
  simulate->add_flag("--linear", linear, "force the n=1 baseline model");

  auto* cmp = app.add_subcommand("compare", "Compare both models against measured traces");
  cmp->add_option("--config", config_path, "actuator config file")->required();
  cmp->add_option("--traces", traces_dir, "directory of trace CSVs")->required();
  cmp->add_option("--out", out_path, "output report JSON")->required();

  app.add_subcommand("materials", "Print the bundled material database CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidationError;
  }

  try {
    if (estimate->parsed())
      return run_estimate_n(db_path, split_names(holdout_csv), std::cout);
    if (fitn->parsed()) return run_fit_n(curve_path, e_mpa, std::cout);
    if (simulate->parsed()) return run_simulate(config_path, out_path, linear);
    if (cmp->parsed()) return run_compare(config_path, traces_dir, out_path);
    return run_materials(std::cout);
  } catch (const numerical_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationError;
  }
}

}  // namespace ludwick::cli
