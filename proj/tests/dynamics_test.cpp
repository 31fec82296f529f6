#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "ludwick/dynamics.hpp"
#include "oracles.hpp"

using namespace ludwick;
constexpr double kPi = std::numbers::pi;

namespace {

ActuatorParams params(double m, double c, double k, double n) {
  return {m, c, k, n, std::nullopt, 0.0};
}

double max_error_vs_analytic(const Trajectory& traj, const oracle::LinearSecondOrder& ref) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < traj.times.size(); ++i)
    worst = std::max(worst, std::abs(traj.angles(i) - ref.angle(traj.times(i))));
  return worst;
}

}  // namespace

TEST_CASE("spring_constant converts MPa and scales with the beam") {
  CHECK(spring_constant(1.0, 1e-10, 0.1) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(spring_constant(0.34, 1e-10, 0.1) == doctest::Approx(0.0068).epsilon(1e-12));
  CHECK_THROWS_AS(spring_constant(1.0, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(spring_constant(0.0, 1.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(spring_constant(1.0, -1.0, 0.1), std::domain_error);
}

TEST_CASE("strain_from_angle, exact and approximate") {
  CHECK(strain_from_angle(BendingGeometry{0.2, 0.1, 0.5}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(strain_from_angle(BendingGeometry{0.1, 0.1, 1.0}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(strain_from_angle(0.8) == 0.8);
  CHECK(BendingGeometry{0.2, 0.1, 0.5}.arc_length() == doctest::Approx(0.1));
  CHECK_THROWS_AS(strain_from_angle(BendingGeometry{0.0, 0.1, 0.5}), std::domain_error);
  CHECK_THROWS_AS(strain_from_angle(-0.1), std::domain_error);
}

TEST_CASE("restoring_torque") {
  CHECK(restoring_torque(params(1, 0, 1, 2), 0.0) == 0.0);
  CHECK(restoring_torque(params(1, 0, 1, 2), 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(restoring_torque(params(1, 0, 0.0068, 2.365), 1.5) ==
        doctest::Approx(oracle::kTorqueK0068n2365t15).epsilon(1e-14));
  CHECK_THROWS_AS(restoring_torque(params(1, 0, 1, 2), -0.1), std::domain_error);

  SUBCASE("threshold switching matches the branches pointwise") {
    ActuatorParams p{1.0, 0.0, 0.7, 2.174, 0.8, 0.0};
    for (int i = 0; i <= 60; ++i) {
      const double th = 1.6 * i / 60.0;
      const double expected = th <= 0.8 ? 0.7 * th : 0.7 * std::pow(th, 2.174);
      CHECK(restoring_torque(p, th) == expected);
    }
    CHECK(restoring_torque(p, 0.8) == doctest::Approx(0.7 * 0.8).epsilon(1e-15));
  }

  SUBCASE("delta_n shifts the exponent on both branches") {
    ActuatorParams p{1.0, 0.0, 2.0, 2.0, 0.5, 0.1};
    CHECK(restoring_torque(p, 0.4) == doctest::Approx(2.0 * std::pow(0.4, 1.1)).epsilon(1e-14));
    CHECK(restoring_torque(p, 1.4) == doctest::Approx(2.0 * std::pow(1.4, 2.1)).epsilon(1e-14));
  }
}

TEST_CASE("params validation") {
  CHECK_THROWS_AS(validate(params(0, 1, 1, 2)), std::domain_error);
  CHECK_THROWS_AS(validate(params(1, -1, 1, 2)), std::domain_error);
  CHECK_THROWS_AS(validate(params(1, 1, 0, 2)), std::domain_error);
  CHECK_THROWS_AS(validate(params(1, 1, 1, 0)), std::domain_error);
  CHECK_THROWS_AS(validate(ActuatorParams{1, 1, 1, 2, -0.5, 0.0}), std::domain_error);
  CHECK_THROWS_AS(validate(ActuatorParams{1, 1, 1, 2, std::nullopt, -2.5}), std::domain_error);
  // zero damping is allowed
  CHECK_NOTHROW(validate(params(1, 0, 1, 2)));
}

TEST_CASE("step_response at equilibrium stays at zero") {
  const auto traj = step_response(params(1, 1, 1, 2), 0.0, 1.0, 1e-3);
  CHECK((traj.angles == 0.0).all());
  CHECK((traj.velocities == 0.0).all());
  CHECK(traj.input_force == 0.0);
}

TEST_CASE("step_response matches the analytic overdamped solution") {
  const auto traj = step_response(params(1, 3, 2, 1), 1.0, 10.0, 1e-3);
  const oracle::LinearSecondOrder ref{1, 3, 2, 1};
  CHECK(max_error_vs_analytic(traj, ref) < 1e-6);
}

TEST_CASE("step_response converges to the nonlinear steady state") {
  const auto traj = step_response(params(1, 2, 1, 2), 4.0, 60.0, 1e-3);
  const double last = traj.angles(traj.angles.size() - 1);
  CHECK(last == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(traj.velocities(traj.velocities.size() - 1)) < 1e-6);
  // independent root of K*theta^n = F
  CHECK(last == doctest::Approx(oracle::power_root(1.0, 2.0, 4.0, 0.0, kPi)).epsilon(1e-6));
}

TEST_CASE("trajectory grid ends within one step of t_end") {
  const auto traj = step_response(params(1, 1, 1, 1), 0.5, 0.0105, 1e-3);
  const double last = traj.times(traj.times.size() - 1);
  CHECK(last >= 0.0105 - 1e-12);
  CHECK(last < 0.0105 + 1e-3);
  CHECK(traj.times.size() == traj.angles.size());
  CHECK(traj.times.size() == traj.velocities.size());
  CHECK(traj.times.size() >= 2);
}

TEST_CASE("step_response rejects invalid arguments") {
  CHECK_THROWS_AS(step_response(params(1, 1, 1, 1), 1.0, 0.0, 1e-3), std::domain_error);
  CHECK_THROWS_AS(step_response(params(1, 1, 1, 1), 1.0, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(step_response(params(1, 1, 1, 1), 1.0, 1.0, 1e-3, -0.1), std::domain_error);
  CHECK_THROWS_AS(step_response(params(1, 1, 1, 1), 1.0, 1.0, 1e-3, 3.2), std::domain_error);
  CHECK_THROWS_AS(step_response(params(0, 1, 1, 1), 1.0, 1.0), std::domain_error);
}

TEST_CASE("too large a step is reported as instability, not garbage") {
  // undamped stiff spring, dt far beyond the stability limit
  CHECK_THROWS_AS(step_response(params(1e-6, 0, 100, 1), 1.0, 10.0, 0.5), numerical_error);
}

TEST_CASE("linear baseline is bitwise identical for n = 1") {
  const auto a = step_response(params(1.2, 0.8, 2.5, 1.0), 1.3, 5.0, 1e-3, 0.2, -0.1);
  const auto b = linear_step_response(params(1.2, 0.8, 2.5, 1.0), 1.3, 5.0, 1e-3, 0.2, -0.1);
  CHECK((a.angles == b.angles).all());
  CHECK((a.velocities == b.velocities).all());
  CHECK((a.times == b.times).all());
}

TEST_CASE("linear baseline ignores power, eta and delta_n") {
  ActuatorParams p{1.0, 2.0, 1.0, 2.4, 0.7, 0.2};
  const auto lin = linear_step_response(p, 1.0, 10.0, 1e-3);
  const auto ref = step_response(params(1, 2, 1, 1), 1.0, 10.0, 1e-3);
  CHECK((lin.angles == ref.angles).all());
}

TEST_CASE("linear critically damped response matches 1 - e^{-t}(1+t)") {
  const auto traj = linear_step_response(params(1, 2, 1, 1), 1.0, 10.0, 1e-3);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times(i);
    worst = std::max(worst, std::abs(traj.angles(i) - (1.0 - std::exp(-t) * (1.0 + t))));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("unforced response decays to rest") {
  const auto traj = linear_step_response(params(1, 2, 1, 1), 0.0, 30.0, 1e-3, 0.9);
  CHECK(std::abs(traj.angles(traj.angles.size() - 1)) < 1e-4);
  CHECK(traj.angles(0) == 0.9);
}

TEST_CASE("clamp holds the state at pi while the force can sustain it") {
  // (F/K)^{1/n} = 15^{1/1.8} ~ 4.5 rad, beyond the collision angle
  const auto traj = step_response(params(0.5, 1, 0.2, 1.8), 3.0, 10.0, 1e-3);
  CHECK((traj.angles <= kPi + 1e-12).all());
  CHECK((traj.angles >= 0.0).all());
  CHECK(traj.angles(traj.angles.size() - 1) == kPi);
  CHECK(traj.velocities(traj.velocities.size() - 1) == 0.0);
  // once the clamp engages it never releases under this constant force
  bool seen = false;
  for (Eigen::Index i = 0; i < traj.angles.size(); ++i) {
    if (traj.angles(i) == kPi) seen = true;
    if (seen) CHECK(traj.angles(i) == kPi);
  }
  CHECK(seen);
}

TEST_CASE("clamp releases when the force cannot hold the state at pi") {
  // start exactly at the limit with no force: the spring pulls the tip back.
  // With n > 1 the spring softens near zero and the tail decay is algebraic,
  // so the horizon is generous.
  const auto traj = step_response(params(1, 2, 0.5, 1.5), 0.0, 100.0, 1e-3, kPi);
  CHECK(traj.angles(0) == kPi);
  CHECK(traj.angles(traj.angles.size() - 1) < 0.01);
  CHECK((traj.angles <= kPi + 1e-12).all());
}

TEST_CASE("floor keeps unforced oscillations inside the domain") {
  // lightly damped release from 0.5 rad: the linear system would swing
  // negative, the actuator instead settles on the straight rest shape
  const auto traj = step_response(params(1, 0.05, 4, 1), 0.0, 20.0, 1e-3, 0.5);
  CHECK((traj.angles >= 0.0).all());
  CHECK((traj.angles <= kPi + 1e-12).all());
  CHECK(traj.angles(traj.angles.size() - 1) == 0.0);
}

TEST_CASE("overdamped responses from rest rise monotonically") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> m_dist(0.5, 2.0), k_dist(0.5, 3.0), n_dist(1.0, 2.5);
  int tested = 0;
  while (tested < 10) {
    const double m = m_dist(rng), k = k_dist(rng), n = n_dist(rng);
    const double f = k * std::pow(0.8, n);  // steady state at 0.8 rad
    const double stiff = k * n * std::pow(0.8, n - 1.0);
    const double c = 3.0 * std::sqrt(4.0 * m * stiff);  // safely overdamped
    const auto traj = step_response(params(m, c, k, n), f, 30.0, 1e-3);
    for (Eigen::Index i = 1; i < traj.angles.size(); ++i)
      REQUIRE(traj.angles(i) >= traj.angles(i - 1) - 1e-12);
    ++tested;
  }
}

TEST_CASE("long-horizon state matches steady_state_angle") {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> m_dist(0.5, 2.0), c_dist(0.8, 3.0), k_dist(0.5, 3.0),
      n_dist(1.0, 2.5), target(0.5, 2.8);
  for (int i = 0; i < 8; ++i) {
    const ActuatorParams p = params(m_dist(rng), c_dist(rng), k_dist(rng), n_dist(rng));
    const double goal = target(rng);
    const double f = p.spring_k * std::pow(goal, p.power);
    // ~14 decay constants of the slowest local mode at the equilibrium
    const double k_eff = p.spring_k * p.power * std::pow(goal, p.power - 1.0);
    const double disc = p.damping * p.damping - 4.0 * p.mass * k_eff;
    const double slow = disc > 0.0 ? (p.damping - std::sqrt(disc)) / (2.0 * p.mass)
                                   : p.damping / (2.0 * p.mass);
    const auto traj = step_response(p, f, 5.0 + 14.0 / slow, 1e-3);
    const double expected = steady_state_angle(p, f);
    CHECK(traj.angles(traj.angles.size() - 1) == doctest::Approx(expected).epsilon(1e-4));
    CHECK(std::abs(traj.velocities(traj.velocities.size() - 1)) < 1e-4);
    // residual at the converged angle
    const double residual = p.spring_k * std::pow(expected, p.power) - f;
    CHECK(std::abs(residual) < 1e-6 * std::max(f, p.spring_k));
  }
}

TEST_CASE("steady_state_angle") {
  CHECK(steady_state_angle(params(1, 1, 2, 1), 1.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(steady_state_angle(params(1, 1, 1, 2), 4.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(steady_state_angle(params(1, 1, 0.5, 2.365), 0.8) ==
        doctest::Approx(oracle::kRootHalfN2365F08).epsilon(1e-9));
  CHECK(steady_state_angle(params(1, 1, 1, 2), 0.0) == 0.0);
  // force beyond the clamp capacity pins the equilibrium at pi
  CHECK(steady_state_angle(params(1, 1, 0.2, 1.8), 3.0) == kPi);
  CHECK_THROWS_AS(steady_state_angle(params(1, 1, 1, 2), -1.0), std::domain_error);

  SUBCASE("eta branches") {
    // root on the linear branch: F <= K*eta
    ActuatorParams p{1.0, 1.0, 1.0, 2.174, 1.07, 0.0};
    CHECK(steady_state_angle(p, 0.5) == doctest::Approx(0.5).epsilon(1e-9));
    // root on the power branch: F >= K*eta^n
    CHECK(steady_state_angle(p, 2.0) ==
          doctest::Approx(std::pow(2.0, 1.0 / 2.174)).epsilon(1e-9));
    // inside the jump gap (K*eta < F < K*eta^n): pinned at the discontinuity
    CHECK(steady_state_angle(p, 1.10) == 1.07);
    // the dynamics indeed settle there
    const auto traj = step_response(p, 1.10, 80.0, 1e-3);
    CHECK(traj.angles(traj.angles.size() - 1) == doctest::Approx(1.07).epsilon(1e-3));
  }

  SUBCASE("eta below 1 jumps downward; first equilibrium is the linear one") {
    ActuatorParams p{1.0, 2.0, 1.0, 2.222, 0.7, 0.0};
    // K*eta^n ~ 0.453 < F=0.6 < K*eta = 0.7: both branches have roots,
    // and from rest the response stops at the linear-branch angle
    CHECK(steady_state_angle(p, 0.6) == doctest::Approx(0.6).epsilon(1e-9));
    const auto traj = step_response(p, 0.6, 60.0, 1e-3);
    CHECK(traj.angles(traj.angles.size() - 1) == doctest::Approx(0.6).epsilon(1e-4));
  }
}

TEST_CASE("integrator is fourth order against the analytic solution") {
  const oracle::LinearSecondOrder ref{1, 0.5, 4, 1};
  const auto coarse = step_response(params(1, 0.5, 4, 1), 1.0, 10.0, 0.02);
  const auto fine = step_response(params(1, 0.5, 4, 1), 1.0, 10.0, 0.01);
  const double e1 = max_error_vs_analytic(coarse, ref);
  const double e2 = max_error_vs_analytic(fine, ref);
  const double ratio = e1 / e2;
  CHECK(ratio > 8.0);
  CHECK(ratio < 32.0);
}

TEST_CASE("fit_damping recovers the true damping from a clean trace") {
  const ActuatorParams truth = params(1.0, 1.5, 2.0, 2.0);
  const auto measured = step_response(truth, 1.5, 8.0, 1e-2);
  const auto fit = fit_damping(truth, measured, 1.5, 10.0, 1e-2);
  CHECK(fit.damping == doctest::Approx(1.5).epsilon(1e-3 / 1.5));
  CHECK(fit.rms < 1e-4);
}

TEST_CASE("fit_damping tolerates measurement noise") {
  const ActuatorParams truth = params(1.0, 1.5, 2.0, 2.0);
  auto measured = step_response(truth, 1.5, 8.0, 1e-2);
  std::mt19937 rng(41);
  constexpr double two_deg = 2.0 * std::numbers::pi / 180.0;
  std::uniform_real_distribution<double> noise(-two_deg, two_deg);
  for (Eigen::Index i = 0; i < measured.angles.size(); ++i) {
    measured.angles(i) = std::clamp(measured.angles(i) + noise(rng), 0.0, kPi);
  }
  const auto fit = fit_damping(truth, measured, 1.5, 10.0, 1e-2);
  CHECK(std::abs(fit.damping - 1.5) < 0.1);
}

TEST_CASE("fit_damping reports the residual floor under model mismatch") {
  const ActuatorParams truth = params(1.0, 1.5, 2.0, 2.0);
  const auto measured = step_response(truth, 1.5, 8.0, 1e-2);
  ActuatorParams wrong = truth;
  wrong.spring_k = 3.0;
  const auto fit = fit_damping(wrong, measured, 1.5, 10.0, 1e-2);
  // interior minimum, but the fit cannot explain the data
  CHECK(fit.rms > 0.01);
}

TEST_CASE("fit_damping flags a bracket that excludes the minimum") {
  const ActuatorParams truth = params(1.0, 1.5, 2.0, 2.0);
  const auto measured = step_response(truth, 1.5, 8.0, 1e-2);
  CHECK_THROWS_AS(fit_damping(truth, measured, 1.5, 1.0, 1e-2), numerical_error);
}

TEST_CASE("fit_damping needs enough samples") {
  Trajectory tiny;
  tiny.times = Eigen::ArrayXd::LinSpaced(5, 0.0, 1.0);
  tiny.angles = Eigen::ArrayXd::Zero(5);
  tiny.velocities = Eigen::ArrayXd::Zero(5);
  CHECK_THROWS_AS(fit_damping(params(1, 0, 1, 1), tiny, 1.0), std::invalid_argument);
}

TEST_CASE("trajectory csv uses degrees and records the comment") {
  const auto traj = step_response(params(1, 2, 1, 1), 1.0, 0.01, 1e-3);
  std::ostringstream out;
  write_trajectory_csv(out, traj, "M=1 C=2");
  const std::string text = out.str();
  CHECK(text.find("# M=1 C=2\n") == 0);
  CHECK(text.find("time_s,angle_deg,velocity_degps\n") != std::string::npos);
  CHECK(text.find("0,0,0\n") != std::string::npos);
}
