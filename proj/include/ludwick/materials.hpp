// Constitutive stress-strain laws for soft silicone rubbers and the bundled
// material property database. Stress is in MPa and mixed viscosity in cps
// throughout, matching the datasheet columns; there is no unit conversion
// layer.
#pragma once

#include <cmath>
#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ludwick {

struct MaterialRecord {
  std::string name;
  double youngs_modulus = 0.0;   // E  [MPa]
  double mixed_viscosity = 0.0;  // MV [cps], uncured liquid state
  double tensile_strength = 0.0; // TS [MPa]
  std::optional<double> fractional_power; // n, dimensionless
  std::optional<double> eta;              // strain threshold of the piecewise law
};

inline void validate(const MaterialRecord& m) {
  if (!(m.youngs_modulus > 0.0))
    throw std::domain_error("material '" + m.name + "': youngs_modulus must be > 0");
  if (!(m.mixed_viscosity > 0.0))
    throw std::domain_error("material '" + m.name + "': mixed_viscosity must be > 0");
  if (!(m.tensile_strength > 0.0))
    throw std::domain_error("material '" + m.name + "': tensile_strength must be > 0");
  if (m.fractional_power && !(*m.fractional_power > 0.0))
    throw std::domain_error("material '" + m.name + "': fractional_power must be > 0");
  if (m.eta && !(*m.eta > 0.0))
    throw std::domain_error("material '" + m.name + "': eta must be > 0");
}

template <class Scalar>
struct StrainSampleT {
  Scalar strain = 0;  // (L - L0) / L0, dimensionless, >= 0
  Scalar stress = 0;  // MPa
};
using StrainSample = StrainSampleT<double>;

// sigma = E * eps
template <class Scalar>
Scalar hooke_stress(Scalar youngs_modulus, Scalar strain) {
  if (!(youngs_modulus > Scalar(0))) throw std::domain_error("hooke_stress: E must be > 0");
  if (strain < Scalar(0)) throw std::domain_error("hooke_stress: strain must be >= 0");
  return youngs_modulus * strain;
}

// sigma = E * eps^n. Fractional powers of negative bases are undefined, so
// negative strain is rejected rather than extended.
template <class Scalar>
Scalar ludwick_stress(Scalar youngs_modulus, Scalar power, Scalar strain) {
  if (!(youngs_modulus > Scalar(0))) throw std::domain_error("ludwick_stress: E must be > 0");
  if (!(power > Scalar(0))) throw std::domain_error("ludwick_stress: power must be > 0");
  if (strain < Scalar(0)) throw std::domain_error("ludwick_stress: strain must be >= 0");
  using std::pow;
  return youngs_modulus * pow(strain, power);
}

// Piecewise exponent: 1 below the threshold (boundary included), n above it.
template <class Scalar>
Scalar effective_power(Scalar strain, Scalar eta, Scalar power) {
  if (!(eta > Scalar(0))) throw std::domain_error("effective_power: eta must be > 0");
  if (!(power > Scalar(0))) throw std::domain_error("effective_power: power must be > 0");
  if (strain < Scalar(0)) throw std::domain_error("effective_power: strain must be >= 0");
  return strain <= eta ? Scalar(1) : power;
}

// sigma = E * eps^{n(eps)}. Note the stress is deliberately discontinuous at
// eps = eta whenever eta != 1: the jump is E*(eta - eta^n), and the two
// branches are applied literally with no smoothing.
template <class Scalar>
Scalar varying_stress(Scalar youngs_modulus, Scalar power, Scalar eta, Scalar strain) {
  return ludwick_stress(youngs_modulus, effective_power(strain, eta, power), strain);
}

// ---------------------------------------------------------------------------
// Material database CSV
//   name,youngs_modulus_mpa,mixed_viscosity_cps,tensile_strength_mpa,fractional_power,eta
// fractional_power and eta may be empty. Names must not contain commas.
// ---------------------------------------------------------------------------

inline constexpr std::string_view kMaterialsCsvHeader =
    "name,youngs_modulus_mpa,mixed_viscosity_cps,tensile_strength_mpa,fractional_power,eta";

// The bundled database (also shipped as data/materials.csv).
inline constexpr std::string_view kBuiltinMaterialsCsv =
    "name,youngs_modulus_mpa,mixed_viscosity_cps,tensile_strength_mpa,fractional_power,eta\n"
    "Dragon Skin FX-Pro,0.26,18000,1.99,1.538,\n"
    "Dragon Skin 10 MEDIUM,0.15,23000,3.28,2.174,1.07\n"
    "Dragon Skin 20,0.34,20000,3.79,2.500,\n"
    "Dragon Skin 30,0.59,20000,3.45,2.222,0.7\n"
    "Ecoflex 00-10,0.06,14000,0.83,1.538,\n"
    "Ecoflex 00-30,0.07,3000,1.38,1.613,\n"
    "Ecoflex 00-50,0.08,8000,2.17,1.818,\n"
    "Mold Star 16 FAST,0.38,12500,2.76,2.000,\n"
    "Mold Star 20T,0.32,11000,2.90,2.174,0.8\n"
    "SORTA-Clear 40,0.62,35000,5.51,2.500,\n";

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  const auto last = s.find_last_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return std::string(s.substr(first, last - first + 1));
}

inline double parse_double(const std::string& field, const std::string& context) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw std::invalid_argument(context + ": cannot parse number '" + field + "'");
  return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline std::vector<MaterialRecord> read_materials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("materials csv: empty input");
  if (detail::trim(line) != kMaterialsCsvHeader)
    throw std::invalid_argument("materials csv: unexpected header '" + detail::trim(line) + "'");

  std::vector<MaterialRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 6)
      throw std::invalid_argument("materials csv line " + std::to_string(line_no) +
                                  ": expected 6 fields, got " + std::to_string(fields.size()));
    const std::string context = "materials csv line " + std::to_string(line_no);
    MaterialRecord m;
    m.name = fields[0];
    if (m.name.empty()) throw std::invalid_argument(context + ": empty material name");
    m.youngs_modulus = detail::parse_double(fields[1], context);
    m.mixed_viscosity = detail::parse_double(fields[2], context);
    m.tensile_strength = detail::parse_double(fields[3], context);
    if (!fields[4].empty()) m.fractional_power = detail::parse_double(fields[4], context);
    if (!fields[5].empty()) m.eta = detail::parse_double(fields[5], context);
    validate(m);
    records.push_back(std::move(m));
  }
  return records;
}

inline void write_materials_csv(std::ostream& out, const std::vector<MaterialRecord>& records) {
  out << kMaterialsCsvHeader << '\n';
  for (const auto& m : records) {
    out << m.name << ',' << detail::format_double(m.youngs_modulus) << ','
        << detail::format_double(m.mixed_viscosity) << ','
        << detail::format_double(m.tensile_strength) << ',';
    if (m.fractional_power) out << detail::format_double(*m.fractional_power);
    out << ',';
    if (m.eta) out << detail::format_double(*m.eta);
    out << '\n';
  }
}

// The ten bundled records, parsed once from kBuiltinMaterialsCsv.
inline const std::vector<MaterialRecord>& builtin_materials() {
  static const std::vector<MaterialRecord> records = [] {
    std::istringstream in{std::string(kBuiltinMaterialsCsv)};
    return read_materials_csv(in);
  }();
  return records;
}

}  // namespace ludwick
