#include <cmath>
#include <numbers>
#include <random>

#include "choreo/error.hpp"
#include "choreo/optimize.hpp"
#include "choreo/verify.hpp"
#include "doctest.h"

using namespace choreo;

namespace {

constexpr double kPi = std::numbers::pi;

MassSystem unit_masses(int n, int dim, double period) {
  MassSystem s;
  s.masses.assign(static_cast<std::size_t>(n), 1.0);
  s.dim = dim;
  s.period = period;
  return s;
}

// Unit masses at separation 1 rotating about the origin: w = sqrt(2).
struct Binary {
  double omega = std::sqrt(2.0);
  double period = 2.0 * kPi / std::sqrt(2.0);
  MassSystem sys = unit_masses(2, 2, period);
  StateVector start() const {
    StateVector s;
    s.positions = Configuration(2, 2);
    s.positions << 0.5, 0.0, -0.5, 0.0;
    s.velocities = Configuration(2, 2);
    s.velocities << 0.0, 0.5 * omega, 0.0, -0.5 * omega;
    return s;
  }
  double position_error(int steps) const {
    const auto traj = integrate(start(), sys, period, steps);
    return (traj.back().positions - start().positions).norm();
  }
};

// Equilateral triangle of unit masses on the unit circle: w^2 = 1/sqrt(3).
std::vector<FourierLoop> lagrange_loops(double scale = 1.0) {
  const double omega = std::pow(3.0, -0.25);
  const double period = 2.0 * kPi / omega;
  std::vector<FourierLoop> out;
  for (int i = 0; i < 3; ++i) {
    const double phase = 2.0 * kPi * i / 3.0;
    FourierLoop q(period, 2, 1);
    q.cos_coeff(0, 1) = scale * std::cos(phase);
    q.sin_coeff(0, 1) = -scale * std::sin(phase);
    q.cos_coeff(1, 1) = scale * std::sin(phase);
    q.sin_coeff(1, 1) = scale * std::cos(phase);
    out.push_back(q);
  }
  return out;
}

}  // namespace

TEST_CASE("circular binary") {
  const Binary b;
  CHECK(b.position_error(10000) < 1e-6);
  const auto traj = integrate(b.start(), b.sys, b.period, 10000);
  CHECK(traj.size() == 10001);
  CHECK(traj.back().time == doctest::Approx(b.period));
  CHECK(periodicity_residual(traj) < 1e-6);
  CHECK(energy_profile(traj, b.sys).relative_variation < 1e-8);
  CHECK(total_energy(b.start(), b.sys) == doctest::Approx(2 * 0.5 * 0.25 * b.omega * b.omega - 1.0));

  const auto short_traj = integrate(b.start(), b.sys, 0.9 * b.period, 9000);
  CHECK(periodicity_residual(short_traj) > 0.1);
}

TEST_CASE("fourth-order convergence") {
  const Binary b;
  const double coarse = b.position_error(200), fine = b.position_error(400);
  const double ratio = coarse / fine;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);

  const auto e1 = energy_profile(integrate(b.start(), b.sys, b.period, 200), b.sys).relative_variation;
  const auto e2 = energy_profile(integrate(b.start(), b.sys, b.period, 400), b.sys).relative_variation;
  CHECK(e2 < e1);
}

TEST_CASE("momentum is conserved") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MassSystem sys = unit_masses(4, 3, 1.0);
  sys.masses = {1.0, 2.0, 0.5, 1.5};
  StateVector s;
  s.positions = Configuration(4, 3);
  s.velocities = Configuration(4, 3);
  for (int i = 0; i < 4; ++i) {
    for (int c = 0; c < 3; ++c) {
      s.positions(i, c) = 2.0 * i + u(rng);
      s.velocities(i, c) = 0.3 * u(rng);
    }
  }
  auto momentum = [&](const StateVector& st) {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();
    for (int i = 0; i < 4; ++i) p += sys.masses[i] * st.velocities.row(i).transpose();
    return p;
  };
  const Eigen::Vector3d p0 = momentum(s);
  for (const auto& st : integrate(s, sys, 3.0, 3000)) CHECK((momentum(st) - p0).norm() < 1e-10);
}

TEST_CASE("head-on approach aborts") {
  MassSystem sys = unit_masses(2, 2, 10.0);
  StateVector s;
  s.positions = Configuration(2, 2);
  s.positions << 0.5, 0.0, -0.5, 0.0;
  s.velocities = Configuration::Zero(2, 2);
  try {
    integrate(s, sys, 10.0, 100000);
    FAIL("expected CollisionAbort");
  } catch (const CollisionAbort& e) {
    // Free fall from rest at separation 1 takes pi / (2 sqrt(2 * 2)) * 1.
    CHECK(e.time() == doctest::Approx(kPi / 4.0).epsilon(1e-2));
    CHECK(e.separation() < 1e-8);
  }
  CHECK_THROWS_AS(integrate(s, sys, 1.0, 0), DomainError);
}

TEST_CASE("energy of a kinematic non-solution varies") {
  auto loops = lagrange_loops();
  const MassSystem sys = unit_masses(3, 2, loops[0].period());
  CHECK(kinematic_energy_profile(loops, sys, 256).relative_variation < 1e-12);
  // An ellipse-like distortion is not a solution.
  for (auto& q : loops) q.cos_coeff(0, 1) *= 1.5;
  CHECK(kinematic_energy_profile(loops, sys, 256).relative_variation > 0.05);
}

TEST_CASE("collision diagnostics") {
  const auto loops = lagrange_loops(2.0);
  const auto d = collision_diagnostics(loops, 1e-5);
  CHECK(d.min_separation == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK(d.measure == 0.0);
  CHECK(d.windows.empty());
  CHECK(d.samples == 4096);

  const auto single = collision_diagnostics({loops[0]}, 1e-5);
  CHECK(std::isinf(single.min_separation));
  CHECK(single.windows.empty());
  CHECK(single.measure == 0.0);

  // Even choreography: scheduled origin passages show up as windows.
  const auto spec = ConstraintSpec::figure_eight(4);
  MassSystem s = unit_masses(4, 2, 2.0 * kPi);
  const ActionProblem p(s, spec, default_resolution(spec));
  const auto bodies = p.bodies(seed_curve(p, 1));
  const auto e = collision_diagnostics(bodies, 1e-5, 4096);
  CHECK(e.min_separation < 1e-8);
  CHECK(e.measure > 0.0);
  CHECK(e.measure < 0.01);
  for (double t : {0.25, 0.5}) {
    bool found = false;
    for (const auto& [a, b] : e.windows) found = found || (a <= t * 2.0 * kPi + 1e-9 && t * 2.0 * kPi <= b + 1e-9);
    CHECK(found);
  }
}

TEST_CASE("norm bounds") {
  const double period = 2.0 * kPi;
  const auto spec = ConstraintSpec::mixed(1, {{3, Rational(0)}});
  FourierLoop circle(period, 3, 4);
  circle.sin_coeff(0, 1) = 1.0;
  circle.cos_coeff(2, 1) = 1.0;
  const auto r = norm_bound_check({circle}, spec);
  REQUIRE(r.bounds.size() == 1);
  CHECK(r.bounds[0].sup_norm == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.bounds[0].bound == doctest::Approx(std::sqrt(6.0 * kPi) / 4.0 * std::sqrt(2.0 * kPi)).epsilon(1e-12));
  CHECK(r.bounds[0].bound == doctest::Approx(2.72).epsilon(1e-3));
  CHECK(r.all_nonnegative());

  const auto zero = norm_bound_check({FourierLoop(period, 3, 4)}, spec);
  CHECK(zero.bounds[0].margin == 0.0);
  CHECK(zero.all_nonnegative());

  FourierLoop off = circle;
  off.constant(0) = 0.5;
  CHECK_THROWS_AS(norm_bound_check({off}, spec), InapplicableBoundError);
  CHECK_THROWS_AS(norm_bound_check({circle}, ConstraintSpec::adhoc(5, 3)), InapplicableBoundError);

  const auto m3 = ConstraintSpec::mixed(3, {{3, Rational(0)}, {3, Rational(1, 8)}});
  FourierLoop tilted(period, 3, 4);
  tilted.sin_coeff(0, 1) = 1.0;
  tilted.sin_coeff(2, 1) = 1.0;
  const auto pair = norm_bound_check({tilted}, m3);
  CHECK(pair.bounds.size() == 2);
  // Q has the same kinetic integral as q, so the pair bound is 2 sqrt(2) times larger.
  CHECK(pair.bounds[1].bound == doctest::Approx(2.0 * std::sqrt(2.0) * pair.bounds[0].bound));
  CHECK(pair.all_nonnegative());
}

TEST_CASE("classification of analytic and computed orbits") {
  const auto loops = lagrange_loops();
  const MassSystem sys = unit_masses(3, 2, loops[0].period());
  const auto lag = classify(loops, sys);
  CHECK(lag.classification == Classification::NonCollision);
  CHECK(lag.integration_completed);
  CHECK(lag.kinematic_equation_residual < 1e-10);
  CHECK(lag.energy_constant == doctest::Approx(lag.energy.mean));
  CHECK(kinematic_equation_residual(lagrange_loops(1.2), sys, 256, 1e-3) > 0.1);

  const auto spec = ConstraintSpec::figure_eight(3);
  const ActionProblem p(unit_masses(3, 2, 2.0 * kPi), spec, default_resolution(spec));
  const SolveReport solved = solve_with_continuation(p, seed_curve(p, 1), {}, {});
  const auto gens = p.generators(solved.x);
  const auto fe = classify(p.bodies(solved.x), p.system(), {}, 20000, &spec, &gens);
  CHECK(fe.classification == Classification::NonCollision);
  CHECK(fe.periodicity_residual < 1e-4);
  CHECK(fe.energy.relative_variation < 1e-6);
  REQUIRE(fe.norm_bounds.has_value());
  CHECK(fe.norm_bounds->all_nonnegative());

  const auto spec4 = ConstraintSpec::figure_eight(4);
  const ActionProblem p4(unit_masses(4, 2, 2.0 * kPi), spec4, default_resolution(spec4));
  CHECK(classify(p4.bodies(seed_curve(p4, 1)), p4.system()).classification != Classification::NonCollision);

  CHECK(classification_name(Classification::NonCollision) == "non-collision");
  CHECK(classification_name(Classification::GeneralizedCandidate) == "generalized-candidate");
  CHECK(classification_name(Classification::NotASolution) == "not-a-solution");
}

TEST_CASE("classification is monotone in tolerances") {
  const auto loops = lagrange_loops();
  const MassSystem sys = unit_masses(3, 2, loops[0].period());
  auto distorted = loops;
  for (auto& q : distorted) q.sin_coeff(1, 1) *= 1.0001;

  const std::vector<std::vector<FourierLoop>> cases = {loops, distorted, lagrange_loops(1.05)};
  for (const auto& c : cases) {
    Tolerances tight;
    tight.periodicity = 1e-6;
    tight.energy = 1e-9;
    const int base = classification_rank(classify(c, sys, tight, 4000).classification);
    for (double f : {10.0, 1e3, 1e6}) {
      Tolerances loose = tight;
      loose.periodicity *= f;
      loose.energy *= f;
      loose.measure = std::min(1.0, loose.measure * f);
      loose.collision_threshold /= f;
      CHECK(classification_rank(classify(c, sys, loose, 4000).classification) >= base);
    }
  }
}
