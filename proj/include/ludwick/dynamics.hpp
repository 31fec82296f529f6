// Parameter-varying second-order bending dynamics of a soft pneumatic
// actuator:  M th'' + C th' + K th^{n(th)+dn} = F,  0 <= th <= pi.
//
// Angles are radians everywhere in this header; degrees appear only at file
// and CLI boundaries.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "ludwick/errors.hpp"
#include "ludwick/materials.hpp"

namespace ludwick {

inline constexpr double kDefaultTimeStep = 1e-3;  // s
inline constexpr double kSteadyStateTol = 1e-10;  // rad
// Integration aborts once |theta| or |omega| passes this guard; a fixed-step
// scheme that reaches it was given too large a dt.
inline constexpr double kStateGuard = 1e6;
inline constexpr double kDefaultDampingBracket = 100.0;

struct ActuatorParams {
  double mass = 0.0;      // M, effective inertia
  double damping = 0.0;   // C
  double spring_k = 0.0;  // K = 2EI/L0^2
  double power = 1.0;     // n
  std::optional<double> eta;  // switch threshold; compared against theta (eps ~ theta)
  double delta_n = 0.0;       // exponent perturbation
};

inline void validate(const ActuatorParams& p) {
  if (!(p.mass > 0.0)) throw std::domain_error("actuator params: mass must be > 0");
  if (!(p.damping >= 0.0)) throw std::domain_error("actuator params: damping must be >= 0");
  if (!(p.spring_k > 0.0)) throw std::domain_error("actuator params: spring_k must be > 0");
  if (!(p.power > 0.0)) throw std::domain_error("actuator params: power must be > 0");
  if (p.eta && !(*p.eta > 0.0)) throw std::domain_error("actuator params: eta must be > 0");
  if (!(p.power + p.delta_n > 0.0))
    throw std::domain_error("actuator params: power + delta_n must be > 0");
  if (p.eta && !(1.0 + p.delta_n > 0.0))
    throw std::domain_error("actuator params: 1 + delta_n must be > 0 when eta is set");
}

// Bending geometry of the pressurized actuator: an arc of radius R spanning
// angle theta, grown from rest length L0.
template <class Scalar>
struct BendingGeometryT {
  Scalar radius = 0;       // R [m]
  Scalar rest_length = 0;  // L0 [m]
  Scalar angle = 0;        // theta [rad]

  Scalar arc_length() const { return radius * angle; }  // L = R*theta
};
using BendingGeometry = BendingGeometryT<double>;

// Exact strain of the bent arc: (R/L0)*theta - 1.
template <class Scalar>
Scalar strain_from_angle(const BendingGeometryT<Scalar>& g) {
  if (!(g.radius > Scalar(0))) throw std::domain_error("bending geometry: radius must be > 0");
  if (!(g.rest_length > Scalar(0)))
    throw std::domain_error("bending geometry: rest_length must be > 0");
  if (g.angle < Scalar(0)) throw std::domain_error("bending geometry: angle must be >= 0");
  return g.radius / g.rest_length * g.angle - Scalar(1);
}

// Small-elongation approximation eps ~ theta, the form used inside the
// simulator (the radius of curvature is not observable there).
template <class Scalar>
Scalar strain_from_angle(Scalar angle) {
  if (angle < Scalar(0)) throw std::domain_error("strain_from_angle: angle must be >= 0");
  return angle;
}

// K = 2EI/L0^2 with E given in MPa and converted to Pa.
inline double spring_constant(double youngs_modulus_mpa, double second_moment_m4,
                              double rest_length_m) {
  if (!(youngs_modulus_mpa > 0.0)) throw std::domain_error("spring_constant: E must be > 0");
  if (!(second_moment_m4 > 0.0)) throw std::domain_error("spring_constant: I must be > 0");
  if (!(rest_length_m > 0.0)) throw std::domain_error("spring_constant: L0 must be > 0");
  return 2.0 * (youngs_modulus_mpa * 1e6) * second_moment_m4 / (rest_length_m * rest_length_m);
}

namespace detail {

// Spring torque with the angle clipped into the model domain. RK4 stage
// values can transiently poke just below 0 or above pi; below 0 the torque is
// evaluated at 0 (fractional powers of negative angles are undefined), above
// pi the power law still applies until the step-level clamp projects the
// state back.
inline double torque_at(const ActuatorParams& p, double theta) {
  const double th = theta > 0.0 ? theta : 0.0;
  double exponent = p.power;
  if (p.eta && th <= *p.eta) exponent = 1.0;
  return p.spring_k * std::pow(th, exponent + p.delta_n);
}

}  // namespace detail

// K * theta^{n(theta) + delta_n}; the exponent switches to 1 at or below eta
// using the eps ~ theta approximation.
inline double restoring_torque(const ActuatorParams& p, double theta) {
  validate(p);
  if (theta < 0.0) throw std::domain_error("restoring_torque: theta must be >= 0");
  return detail::torque_at(p, theta);
}

struct Trajectory {
  Eigen::ArrayXd times;       // s, uniform grid
  Eigen::ArrayXd angles;      // rad, within [0, pi]
  Eigen::ArrayXd velocities;  // rad/s
  double input_force = 0.0;   // the constant F applied
};

namespace detail {

// One classical RK4 step of a 2-state system (theta, omega).
template <class Rhs>
Eigen::Vector2d rk4_step(const Rhs& rhs, const Eigen::Vector2d& state, double dt) {
  const Eigen::Vector2d k1 = rhs(state);
  const Eigen::Vector2d k2 = rhs(state + 0.5 * dt * k1);
  const Eigen::Vector2d k3 = rhs(state + 0.5 * dt * k2);
  const Eigen::Vector2d k4 = rhs(state + dt * k3);
  return state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

// Integrates the step response from (theta0, omega0) under constant force.
//
// Clamp semantics: on the step where theta first exceeds pi the state is
// projected to (pi, 0) and held there while the net torque F - K*pi^n stays
// nonnegative; if it turns negative, integration resumes from (pi, 0).
// A mirror projection at theta = 0 keeps every sample inside [0, pi] (the tip
// cannot bend past its fixed end in either direction); the state leaves 0 as
// soon as the force pushes upward.
inline Trajectory step_response(const ActuatorParams& params, double force, double t_end,
                                double dt = kDefaultTimeStep, double theta0 = 0.0,
                                double omega0 = 0.0) {
  validate(params);
  constexpr double pi = std::numbers::pi;
  if (!(t_end > 0.0)) throw std::domain_error("step_response: t_end must be > 0");
  if (!(dt > 0.0)) throw std::domain_error("step_response: dt must be > 0");
  if (!(theta0 >= 0.0 && theta0 <= pi))
    throw std::domain_error("step_response: theta0 must lie in [0, pi]");
  if (!std::isfinite(force) || !std::isfinite(omega0))
    throw std::domain_error("step_response: force and omega0 must be finite");

  const auto steps = static_cast<Eigen::Index>(std::ceil(t_end / dt - 1e-9));
  const Eigen::Index n = std::max<Eigen::Index>(steps, 1);

  Trajectory traj;
  traj.input_force = force;
  traj.times.resize(n + 1);
  traj.angles.resize(n + 1);
  traj.velocities.resize(n + 1);
  traj.times(0) = 0.0;
  traj.angles(0) = theta0;
  traj.velocities(0) = omega0;

  const auto rhs = [&](const Eigen::Vector2d& s) -> Eigen::Vector2d {
    return {s(1), (force - params.damping * s(1) - detail::torque_at(params, s(0))) / params.mass};
  };

  Eigen::Vector2d state{theta0, omega0};
  bool clamped = false;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (clamped) {
      if (force - detail::torque_at(params, pi) >= 0.0) {
        traj.times(i) = static_cast<double>(i) * dt;
        traj.angles(i) = pi;
        traj.velocities(i) = 0.0;
        continue;
      }
      clamped = false;  // net torque turned negative: release
      state = {pi, 0.0};
    }
    state = detail::rk4_step(rhs, state, dt);
    if (!state.allFinite() || std::abs(state(0)) > kStateGuard || std::abs(state(1)) > kStateGuard)
      throw numerical_error("step_response: integration unstable at t = " +
                            std::to_string(static_cast<double>(i) * dt) + " s; reduce dt");
    if (state(0) > pi) {
      state = {pi, 0.0};
      clamped = true;
    } else if (state(0) < 0.0) {
      state = {0.0, 0.0};
    }
    traj.times(i) = static_cast<double>(i) * dt;
    traj.angles(i) = state(0);
    traj.velocities(i) = state(1);
  }
  return traj;
}

// The n = 1 comparison baseline: same integrator with the exponent forced to
// 1 and no threshold switching.
inline Trajectory linear_step_response(const ActuatorParams& params, double force, double t_end,
                                       double dt = kDefaultTimeStep, double theta0 = 0.0,
                                       double omega0 = 0.0) {
  ActuatorParams linear = params;
  linear.power = 1.0;
  linear.eta.reset();
  linear.delta_n = 0.0;
  return step_response(linear, force, t_end, dt, theta0, omega0);
}

// Equilibrium angle of K*theta^{n(theta)+dn} = F on [0, pi], resolved by
// bisection to kSteadyStateTol. With eta set the torque jumps at eta; when F
// falls inside the jump gap (possible for eta > 1) no branch carries a root
// and the dynamics settle onto the discontinuity itself, so eta is returned.
inline double steady_state_angle(const ActuatorParams& params, double force) {
  validate(params);
  if (!(force >= 0.0)) throw std::domain_error("steady_state_angle: force must be >= 0");
  constexpr double pi = std::numbers::pi;
  if (force == 0.0) return 0.0;

  const auto bisect = [&](double lo, double hi) {
    while (hi - lo > kSteadyStateTol) {
      const double mid = 0.5 * (lo + hi);
      (detail::torque_at(params, mid) < force ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  if (params.eta && *params.eta < pi) {
    const double eta = *params.eta;
    const double linear_limit = params.spring_k * std::pow(eta, 1.0 + params.delta_n);
    const double ludwick_onset = params.spring_k * std::pow(eta, params.power + params.delta_n);
    if (force <= linear_limit) return bisect(0.0, eta);
    if (force < ludwick_onset) return eta;  // inside the jump gap
    if (detail::torque_at(params, pi) < force) return pi;
    return bisect(eta, pi);
  }
  if (detail::torque_at(params, pi) < force) return pi;
  return bisect(0.0, pi);
}

namespace detail {

// Golden-section search for the minimum of f on [lo, hi]; returns (x, f(x)).
// Deterministic: fixed shrink ratio, tolerance on the bracket width.
template <class F>
std::pair<double, double> golden_section_minimize(F&& f, double lo, double hi, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

// Linear interpolation of (xs, ys) at x; xs strictly increasing. Endpoints
// are taken within a small relative slack to absorb roundoff.
inline double lerp_series(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& ys, double x) {
  const double eps = 1e-9 * std::max(1.0, std::max(std::abs(xs(0)), std::abs(xs(xs.size() - 1))));
  if (x < xs(0) - eps || x > xs(xs.size() - 1) + eps)
    throw std::domain_error("interpolation: point " + std::to_string(x) +
                            " outside the sampled span");
  if (x <= xs(0)) return ys(0);
  if (x >= xs(xs.size() - 1)) return ys(ys.size() - 1);
  // binary search for the bracketing interval
  Eigen::Index lo = 0, hi = xs.size() - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    (xs(mid) <= x ? lo : hi) = mid;
  }
  const double w = (x - xs(lo)) / (xs(hi) - xs(lo));
  return ys(lo) + w * (ys(hi) - ys(lo));
}

}  // namespace detail

struct DampingFit {
  double damping = 0.0;
  double rms = 0.0;  // residual RMS [rad] at the minimum; a floor well above
                     // the noise level signals model mismatch
};

// Estimates C by minimizing the RMS angle error between a simulated response
// and the measured one, using golden-section search on [0, c_max]. The
// simulation starts from the measured trace's first sample and uses its force
// and time span. Deterministic for fixed inputs.
inline DampingFit fit_damping(const ActuatorParams& params, const Trajectory& measured,
                              double force, double c_max = kDefaultDampingBracket,
                              double dt = kDefaultTimeStep) {
  ActuatorParams candidate = params;
  candidate.damping = 0.0;
  validate(candidate);
  if (!(c_max > 0.0)) throw std::domain_error("fit_damping: c_max must be > 0");
  if (measured.times.size() < 10)
    throw std::invalid_argument("fit_damping: need at least 10 measured samples");
  if (measured.times.size() != measured.angles.size())
    throw std::invalid_argument("fit_damping: measured series lengths differ");

  const double t0 = measured.times(0);
  const double span = measured.times(measured.times.size() - 1) - t0;
  if (!(span > 0.0)) throw std::invalid_argument("fit_damping: measured span is empty");
  const double theta0 = measured.angles(0);
  const double omega0 = measured.velocities.size() == measured.times.size()
                            ? measured.velocities(0)
                            : 0.0;

  const auto objective = [&](double c) {
    ActuatorParams p = candidate;
    p.damping = c;
    const Trajectory sim = step_response(p, force, span, dt, theta0, omega0);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < measured.times.size(); ++i) {
      const double s = detail::lerp_series(sim.times, sim.angles, measured.times(i) - t0);
      const double d = s - measured.angles(i);
      sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(measured.times.size()));
  };

  constexpr double tol = 1e-6;
  const auto [c_hat, rms] = detail::golden_section_minimize(objective, 0.0, c_max, tol);
  if (c_max - c_hat <= 10.0 * tol)
    throw numerical_error("fit_damping: minimum sits at the bracket edge c_max = " +
                          std::to_string(c_max) + "; widen the bracket or check the model");
  return {c_hat, rms};
}

// Trajectory CSV, degrees at the boundary. An optional comment line records
// the resolved run parameters.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 const std::string& comment = {}) {
  constexpr double deg = 180.0 / std::numbers::pi;
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "time_s,angle_deg,velocity_degps\n";
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    out << detail::format_double(traj.times(i)) << ','
        << detail::format_double(traj.angles(i) * deg) << ','
        << detail::format_double(traj.velocities(i) * deg) << '\n';
  }
}

}  // namespace ludwick
