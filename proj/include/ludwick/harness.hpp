// Measured-trace ingestion and the linear-vs-nonlinear comparison protocol:
// interpolate experimental repeats onto a common grid, average them, and
// report RMS errors of both model responses against the average.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ludwick/dynamics.hpp"

namespace ludwick {

// One experimental repeat. Degrees, matching the sensor logs.
struct MeasuredTrace {
  Eigen::ArrayXd times;   // s, strictly increasing
  Eigen::ArrayXd angles;  // deg
};

inline void validate(const MeasuredTrace& trace) {
  if (trace.times.size() != trace.angles.size())
    throw std::invalid_argument("trace: time and angle series lengths differ");
  if (trace.times.size() < 2) throw std::invalid_argument("trace: need at least 2 samples");
  for (Eigen::Index i = 1; i < trace.times.size(); ++i)
    if (!(trace.times(i) > trace.times(i - 1)))
      throw std::invalid_argument("trace: times must be strictly increasing (violated at sample " +
                                  std::to_string(i) + ")");
}

struct ComparisonReport {
  double rms_nonlinear = 0.0;  // deg
  double rms_linear = 0.0;     // deg
  double setpoint = 0.0;       // deg, steady-state angle of the nonlinear model
  int trace_count = 0;
  MeasuredTrace mean_trace;
};

// Measurement grid rate for averaging and comparison.
inline constexpr double kComparisonGridStep = 0.01;  // s (100 Hz)
// Simulation step used inside compare(); kept at <= one fifth of the grid
// period so resampling error is negligible.
inline constexpr double kComparisonTimeStep = 1e-3;  // s

inline Eigen::ArrayXd resample(const MeasuredTrace& trace, const Eigen::ArrayXd& grid) {
  validate(trace);
  Eigen::ArrayXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out(i) = detail::lerp_series(trace.times, trace.angles, grid(i));
  return out;
}

// Pointwise average of traces linearly interpolated onto the grid. The grid
// must lie inside every trace's span; there is no extrapolation.
inline MeasuredTrace mean_trace(const std::vector<MeasuredTrace>& traces,
                                const Eigen::ArrayXd& grid) {
  if (traces.empty()) throw std::invalid_argument("mean_trace: need at least 1 trace");
  if (grid.size() < 1) throw std::invalid_argument("mean_trace: empty grid");
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(grid.size());
  for (const auto& trace : traces) sum += resample(trace, grid);
  return {grid, sum / static_cast<double>(traces.size())};
}

// Root-mean-square angle difference of two traces on the same grid.
inline double rms_error(const MeasuredTrace& a, const MeasuredTrace& b) {
  if (a.times.size() != b.times.size() || (a.times != b.times).any())
    throw std::invalid_argument("rms_error: traces are not on a common grid");
  if (a.times.size() < 2) throw std::invalid_argument("rms_error: need at least 2 grid points");
  return std::sqrt((a.angles - b.angles).square().mean());
}

// Simulates both model variants from rest over the traces' common time span
// and reports their RMS errors against the average measured response.
inline ComparisonReport compare(const ActuatorParams& params, double force,
                                const std::vector<MeasuredTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("compare: need at least 1 trace");
  // The grid spans the intersection of all trace spans (no extrapolation),
  // intersected with t >= 0 where the simulation is defined.
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (const auto& trace : traces) {
    validate(trace);
    lo = std::max(lo, trace.times(0));
    hi = std::min(hi, trace.times(trace.times.size() - 1));
  }
  const auto points = static_cast<Eigen::Index>(std::floor((hi - lo) / kComparisonGridStep + 1e-9)) + 1;
  if (points < 2)
    throw std::invalid_argument("compare: common span of the traces is shorter than one grid step");
  const Eigen::ArrayXd grid =
      lo + kComparisonGridStep * Eigen::ArrayXd::LinSpaced(points, 0.0, static_cast<double>(points - 1));

  const MeasuredTrace mean = mean_trace(traces, grid);

  constexpr double deg = 180.0 / std::numbers::pi;
  const Trajectory nonlinear = step_response(params, force, hi, kComparisonTimeStep);
  const Trajectory linear = linear_step_response(params, force, hi, kComparisonTimeStep);

  const auto model_on_grid = [&](const Trajectory& traj) {
    MeasuredTrace t{traj.times, traj.angles * deg};
    return MeasuredTrace{grid, resample(t, grid)};
  };

  ComparisonReport report;
  report.rms_nonlinear = rms_error(model_on_grid(nonlinear), mean);
  report.rms_linear = rms_error(model_on_grid(linear), mean);
  report.setpoint = steady_state_angle(params, force) * deg;
  report.trace_count = static_cast<int>(traces.size());
  report.mean_trace = mean;
  return report;
}

// ---------------------------------------------------------------------------
// I/O
// ---------------------------------------------------------------------------

// Trace CSV: header "time_s,angle_deg". Simulator output files
// (time_s,angle_deg,velocity_degps plus a leading # comment) are accepted
// too; the extra column is ignored.
inline MeasuredTrace read_trace_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  do {
    if (!std::getline(in, line)) throw std::invalid_argument("trace csv: empty input");
    ++line_no;
  } while (detail::trim(line).empty() || detail::trim(line).front() == '#');

  const std::string header = detail::trim(line);
  if (header != "time_s,angle_deg" && header != "time_s,angle_deg,velocity_degps")
    throw std::invalid_argument("trace csv: unexpected header '" + header + "'");
  const std::size_t columns = header == "time_s,angle_deg" ? 2 : 3;

  std::vector<double> times, angles;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    const std::string context = "trace csv line " + std::to_string(line_no);
    if (fields.size() != columns)
      throw std::invalid_argument(context + ": expected " + std::to_string(columns) +
                                  " fields, got " + std::to_string(fields.size()));
    times.push_back(detail::parse_double(fields[0], context));
    angles.push_back(detail::parse_double(fields[1], context));
  }
  MeasuredTrace trace{
      Eigen::ArrayXd::Map(times.data(), static_cast<Eigen::Index>(times.size())),
      Eigen::ArrayXd::Map(angles.data(), static_cast<Eigen::Index>(angles.size()))};
  validate(trace);
  return trace;
}

inline void write_trace_csv(std::ostream& out, const MeasuredTrace& trace) {
  out << "time_s,angle_deg\n";
  for (Eigen::Index i = 0; i < trace.times.size(); ++i)
    out << detail::format_double(trace.times(i)) << ','
        << detail::format_double(trace.angles(i)) << '\n';
}

inline std::string report_to_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["rms_nonlinear_deg"] = report.rms_nonlinear;
  j["rms_linear_deg"] = report.rms_linear;
  j["setpoint_deg"] = report.setpoint;
  j["trace_count"] = report.trace_count;
  auto& mean = j["mean_trace"];
  mean["time_s"] = std::vector<double>(report.mean_trace.times.begin(),
                                       report.mean_trace.times.end());
  mean["angle_deg"] = std::vector<double>(report.mean_trace.angles.begin(),
                                          report.mean_trace.angles.end());
  return j.dump(2) + "\n";
}

}  // namespace ludwick
