// Least-squares estimation of the fractional power from material properties,
// and direct fitting of the power from measured stress-strain samples.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ludwick/errors.hpp"
#include "ludwick/materials.hpp"

namespace ludwick {

// Predictor normalizations. E enters unnormalized; viscosity and tensile
// strength are scaled before the square root.
inline constexpr double kViscosityNorm = 50000.0;  // cps
inline constexpr double kTensileNorm = 10.0;       // MPa

// Condition-number bound on A'A beyond which the fit is declared singular.
inline constexpr double kConditionLimit = 1e12;

// One row of the design matrix: (E, sqrt(MV/50000), sqrt(TS/10)).
struct DesignRow {
  double e_term = 0.0;
  double mv_term = 0.0;
  double ts_term = 0.0;

  Eigen::Vector3d vector() const { return {e_term, mv_term, ts_term}; }
};

// Fitted three-coefficient predictor: n_hat = E*x1 + sqrt(MV/50000)*x2 + sqrt(TS/10)*x3.
struct PowerLawModel {
  double x1 = 0.0;  // per-MPa coefficient
  double x2 = 0.0;
  double x3 = 0.0;
  double mv_norm = kViscosityNorm;
  double ts_norm = kTensileNorm;

  Eigen::Vector3d coefficients() const { return {x1, x2, x3}; }
};

inline DesignRow design_row(const MaterialRecord& m) {
  validate(m);
  return {m.youngs_modulus, std::sqrt(m.mixed_viscosity / kViscosityNorm),
          std::sqrt(m.tensile_strength / kTensileNorm)};
}

// Normal-equations solve x = (A'A)^{-1} A'y via a 3x3 LDLT. Throws
// numerical_error when the condition estimate of A'A exceeds kConditionLimit.
inline Eigen::Vector3d solve_normal_equations(const Eigen::Matrix<double, Eigen::Dynamic, 3>& a,
                                              const Eigen::VectorXd& y) {
  if (a.rows() != y.rows()) throw std::invalid_argument("solve_normal_equations: size mismatch");
  const Eigen::Matrix3d ata = a.transpose() * a;
  const Eigen::Vector3d aty = a.transpose() * y;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eigs(ata);
  const double lo = eigs.eigenvalues().minCoeff();
  const double hi = eigs.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || !(hi / lo < kConditionLimit) || !std::isfinite(hi))
    throw numerical_error("normal equations are numerically singular (condition estimate " +
                          std::to_string(lo > 0.0 ? hi / lo : std::nan("")) + ")");
  return ata.ldlt().solve(aty);
}

inline PowerLawModel fit_model(const std::vector<MaterialRecord>& training) {
  if (training.size() < 3)
    throw std::invalid_argument("fit_model: need at least 3 training records, got " +
                                std::to_string(training.size()));
  Eigen::Matrix<double, Eigen::Dynamic, 3> a(static_cast<Eigen::Index>(training.size()), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(training.size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const auto& m = training[static_cast<std::size_t>(i)];
    if (!m.fractional_power)
      throw std::invalid_argument("fit_model: material '" + m.name +
                                  "' has no fractional_power; fit it from curve data first");
    a.row(i) = design_row(m).vector();
    y(i) = *m.fractional_power;
  }
  const Eigen::Vector3d x = solve_normal_equations(a, y);
  return {x(0), x(1), x(2), kViscosityNorm, kTensileNorm};
}

inline double predict_n(const PowerLawModel& model, const MaterialRecord& m) {
  return design_row(m).vector().dot(model.coefficients());
}

// Fit n from stress-strain samples with E held at the datasheet value:
// the closed-form slope of ln(sigma) - ln(E) against n*ln(eps). Samples at
// eps = 1 contribute nothing (ln 1 = 0) and need no special casing.
inline double fit_n_from_curve(const std::vector<StrainSample>& samples, double youngs_modulus) {
  if (!(youngs_modulus > 0.0)) throw std::domain_error("fit_n_from_curve: E must be > 0");

  std::vector<double> log_strain, log_stress;
  log_strain.reserve(samples.size());
  log_stress.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.strain < 0.0) throw std::domain_error("fit_n_from_curve: strain must be >= 0");
    if (s.stress < 0.0) throw std::domain_error("fit_n_from_curve: stress must be >= 0");
    if (s.strain > 0.0 && s.stress > 0.0) {
      log_strain.push_back(std::log(s.strain));
      log_stress.push_back(std::log(s.stress));
    }
  }
  if (log_strain.size() < 2)
    throw std::invalid_argument("fit_n_from_curve: fewer than 2 usable samples (need strain > 0 "
                                "and stress > 0)");

  const auto le = Eigen::ArrayXd::Map(log_strain.data(), static_cast<Eigen::Index>(log_strain.size()));
  const auto ls = Eigen::ArrayXd::Map(log_stress.data(), static_cast<Eigen::Index>(log_stress.size()));
  const double denom = (le * le).sum();
  if (denom == 0.0)
    throw std::invalid_argument("fit_n_from_curve: all strains equal 1; the slope is undetermined");
  const double power = (le * (ls - std::log(youngs_modulus))).sum() / denom;
  if (!(power > 0.0))
    throw numerical_error("fit_n_from_curve: fitted power " + std::to_string(power) +
                          " is not positive; data is inconsistent with a rising power law");
  return power;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

// Flat reproducibility record: "x1=<v> x2=<v> x3=<v> mv_norm=50000 ts_norm=10".
inline std::string to_string(const PowerLawModel& model) {
  using detail::format_double;
  return "x1=" + format_double(model.x1) + " x2=" + format_double(model.x2) +
         " x3=" + format_double(model.x3) + " mv_norm=" + format_double(model.mv_norm) +
         " ts_norm=" + format_double(model.ts_norm);
}

inline PowerLawModel parse_model(std::string_view text) {
  PowerLawModel model;
  bool seen[5] = {};
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("power-law model: expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const double value = detail::parse_double(token.substr(eq + 1), "power-law model");
    if (key == "x1") { model.x1 = value; seen[0] = true; }
    else if (key == "x2") { model.x2 = value; seen[1] = true; }
    else if (key == "x3") { model.x3 = value; seen[2] = true; }
    else if (key == "mv_norm") { model.mv_norm = value; seen[3] = true; }
    else if (key == "ts_norm") { model.ts_norm = value; seen[4] = true; }
    else throw std::invalid_argument("power-law model: unknown key '" + key + "'");
  }
  for (bool s : seen)
    if (!s) throw std::invalid_argument("power-law model: missing field in '" + std::string(text) + "'");
  if (model.mv_norm != kViscosityNorm || model.ts_norm != kTensileNorm)
    throw std::invalid_argument("power-law model: normalization constants must be 50000 cps / 10 MPa");
  return model;
}

// Stress-strain sample CSV: header "strain,stress_mpa", one sample per row.
inline std::vector<StrainSample> read_strain_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("strain csv: empty input");
  if (detail::trim(line) != "strain,stress_mpa")
    throw std::invalid_argument("strain csv: unexpected header '" + detail::trim(line) + "'");
  std::vector<StrainSample> samples;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    const std::string context = "strain csv line " + std::to_string(line_no);
    if (fields.size() != 2)
      throw std::invalid_argument(context + ": expected 2 fields, got " +
                                  std::to_string(fields.size()));
    StrainSample s{detail::parse_double(fields[0], context),
                   detail::parse_double(fields[1], context)};
    if (s.strain < 0.0 || s.stress < 0.0)
      throw std::invalid_argument(context + ": strain and stress must be >= 0");
    samples.push_back(s);
  }
  return samples;
}

}  // namespace ludwick
