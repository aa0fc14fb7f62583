#include "choreo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "choreo/error.hpp"

namespace choreo {

StateVector initial_state(const std::vector<FourierLoop>& bodies) {
  if (bodies.empty()) throw DimensionError("initial_state: no bodies");
  const int n = static_cast<int>(bodies.size());
  const int dim = bodies.front().dim();
  StateVector s{Configuration(n, dim), Configuration(n, dim), 0.0};
  for (int b = 0; b < n; ++b) {
    s.positions.row(b) = evaluate(bodies[b], 0.0).transpose();
    s.velocities.row(b) = velocity(bodies[b], 0.0).transpose();
  }
  return s;
}

namespace {

Configuration accelerations(const Configuration& q, const MassSystem& sys, double time) {
  Configuration a;
  try {
    a = force_field(q, sys);
  } catch (const CollisionError& e) {
    throw CollisionAbort(time, 0.0, std::string("collision during integration: ") + e.what());
  }
  for (int i = 0; i < a.rows(); ++i) a.row(i) /= sys.masses[i];
  return a;
}

void check_separation(const Configuration& q, double time, double threshold) {
  const double sep = min_pair_separation(q);
  if (sep < threshold) {
    throw CollisionAbort(time, sep,
                         "separation " + std::to_string(sep) + " below abort threshold at t=" + std::to_string(time));
  }
}

// Closest approach of each pair along the chord between two steps, so a pair
// that passes through each other within one step is still caught.
void check_step(const Configuration& before, const Configuration& after, double t0, double h, double threshold) {
  if (!after.allFinite()) throw CollisionAbort(t0 + h, 0.0, "state became non-finite at t=" + std::to_string(t0 + h));
  const int n = static_cast<int>(after.rows());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const Eigen::RowVectorXd r0 = before.row(a) - before.row(b);
      const Eigen::RowVectorXd dr = (after.row(a) - after.row(b)) - r0;
      const double dd = dr.squaredNorm();
      const double lambda = dd > 0.0 ? std::clamp(-r0.dot(dr) / dd, 0.0, 1.0) : 0.0;
      const double sep = (r0 + lambda * dr).norm();
      if (sep < threshold) {
        const double t = t0 + lambda * h;
        throw CollisionAbort(t, sep,
                             "separation " + std::to_string(sep) + " below abort threshold at t=" + std::to_string(t));
      }
    }
  }
}

}  // namespace

std::vector<StateVector> integrate(const StateVector& start, const MassSystem& sys, double duration, int steps,
                                   double abort_threshold) {
  if (steps < 1) throw DomainError("integrate: steps must be at least 1");
  if (start.positions.rows() != sys.n_bodies()) throw DimensionError("integrate: body count mismatch");
  const double h = duration / steps;
  std::vector<StateVector> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(start);
  check_separation(start.positions, start.time, abort_threshold);

  Configuration q = start.positions, v = start.velocities;
  for (int s = 0; s < steps; ++s) {
    const double t = start.time + s * h;
    const Configuration k1q = v;
    const Configuration k1v = accelerations(q, sys, t);
    const Configuration k2q = v + 0.5 * h * k1v;
    const Configuration k2v = accelerations(q + 0.5 * h * k1q, sys, t + 0.5 * h);
    const Configuration k3q = v + 0.5 * h * k2v;
    const Configuration k3v = accelerations(q + 0.5 * h * k2q, sys, t + 0.5 * h);
    const Configuration k4q = v + h * k3v;
    const Configuration k4v = accelerations(q + h * k3q, sys, t + h);
    q += (h / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    const double t_next = start.time + (s + 1) * h;
    check_step(out.back().positions, q, t, h, abort_threshold);
    out.push_back({q, v, t_next});
  }
  return out;
}

double periodicity_residual(const StateVector& first, const StateVector& last) {
  const double num = std::sqrt((last.positions - first.positions).squaredNorm() +
                               (last.velocities - first.velocities).squaredNorm());
  const double den = std::sqrt(first.positions.squaredNorm() + first.velocities.squaredNorm());
  return den > 0.0 ? num / den : num;
}

double periodicity_residual(const std::vector<StateVector>& trajectory) {
  if (trajectory.size() < 2) return 0.0;
  return periodicity_residual(trajectory.front(), trajectory.back());
}

double total_energy(const StateVector& s, const MassSystem& sys) {
  double kinetic = 0.0;
  for (int i = 0; i < s.velocities.rows(); ++i) kinetic += 0.5 * sys.masses[i] * s.velocities.row(i).squaredNorm();
  return kinetic - total_potential(s.positions, sys);
}

namespace {

EnergyProfile summarize(std::vector<double> values) {
  EnergyProfile p;
  p.values = std::move(values);
  if (p.values.empty()) return p;
  const auto [lo, hi] = std::minmax_element(p.values.begin(), p.values.end());
  p.min = *lo;
  p.max = *hi;
  double sum = 0.0;
  for (double e : p.values) sum += e;
  p.mean = sum / static_cast<double>(p.values.size());
  p.relative_variation = (p.max - p.min) / std::abs(p.mean);
  return p;
}

Configuration loop_positions(const std::vector<FourierLoop>& bodies, double t) {
  Configuration q(static_cast<Eigen::Index>(bodies.size()), bodies.front().dim());
  for (std::size_t b = 0; b < bodies.size(); ++b) q.row(static_cast<Eigen::Index>(b)) = evaluate(bodies[b], t).transpose();
  return q;
}

}  // namespace

EnergyProfile energy_profile(const std::vector<StateVector>& trajectory, const MassSystem& sys) {
  std::vector<double> values;
  values.reserve(trajectory.size());
  for (const auto& s : trajectory) values.push_back(total_energy(s, sys));
  return summarize(std::move(values));
}

EnergyProfile kinematic_energy_profile(const std::vector<FourierLoop>& bodies, const MassSystem& sys, int samples) {
  std::vector<double> values;
  const double period = bodies.front().period();
  for (int j = 0; j < samples; ++j) {
    const double t = period * j / samples;
    StateVector s{loop_positions(bodies, t), Configuration(), t};
    s.velocities.resize(s.positions.rows(), s.positions.cols());
    for (std::size_t b = 0; b < bodies.size(); ++b) {
      s.velocities.row(static_cast<Eigen::Index>(b)) = velocity(bodies[b], t).transpose();
    }
    if (bodies.size() > 1 && !(min_pair_separation(s.positions) > 0.0)) continue;
    values.push_back(total_energy(s, sys));
  }
  return summarize(std::move(values));
}

namespace {

struct SampleSeparation {
  double sep;
  int i, j;
};

SampleSeparation closest(const Configuration& q) {
  SampleSeparation best{std::numeric_limits<double>::infinity(), -1, -1};
  for (int i = 0; i < q.rows(); ++i) {
    for (int j = i + 1; j < q.rows(); ++j) {
      const double r = (q.row(i) - q.row(j)).norm();
      if (r < best.sep) best = {r, i, j};
    }
  }
  return best;
}

CollisionDiagnostics diagnose(const std::vector<double>& times, const std::vector<Configuration>& configs,
                              double threshold) {
  CollisionDiagnostics d;
  d.samples = static_cast<int>(times.size());
  d.min_separation = std::numeric_limits<double>::infinity();
  if (configs.empty() || configs.front().rows() < 2) return d;
  int below = 0;
  bool open = false;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto c = closest(configs[k]);
    if (c.sep < d.min_separation) {
      d.min_separation = c.sep;
      d.time_of_min = times[k];
      d.closest_pair = {c.i, c.j};
    }
    if (c.sep < threshold) {
      ++below;
      if (!open) d.windows.emplace_back(times[k], times[k]);
      d.windows.back().second = times[k];
      open = true;
    } else {
      open = false;
    }
  }
  d.measure = static_cast<double>(below) / static_cast<double>(times.size());
  return d;
}

}  // namespace

CollisionDiagnostics collision_diagnostics(const std::vector<FourierLoop>& bodies, double threshold, int samples) {
  if (bodies.empty()) return {};
  std::vector<double> times;
  std::vector<Configuration> configs;
  const double period = bodies.front().period();
  for (int j = 0; j < samples; ++j) {
    times.push_back(period * j / samples);
    configs.push_back(loop_positions(bodies, times.back()));
  }
  return diagnose(times, configs, threshold);
}

CollisionDiagnostics collision_diagnostics(const std::vector<StateVector>& trajectory, double threshold) {
  std::vector<double> times;
  std::vector<Configuration> configs;
  for (const auto& s : trajectory) {
    times.push_back(s.time);
    configs.push_back(s.positions);
  }
  return diagnose(times, configs, threshold);
}

// ---------------------------------------------------------------------------
// Norm bounds

bool NormBoundReport::all_nonnegative() const {
  return std::all_of(bounds.begin(), bounds.end(), [](const NormBound& b) { return b.margin >= 0.0; });
}

namespace {

double sup_norm(const std::vector<const FourierLoop*>& parts, int samples) {
  const double period = parts.front()->period();
  double best = 0.0;
  for (int j = 0; j < samples; ++j) {
    double sq = 0.0;
    for (const auto* loop : parts) sq += evaluate(*loop, period * j / samples).squaredNorm();
    best = std::max(best, std::sqrt(sq));
  }
  return best;
}

}  // namespace

NormBoundReport norm_bound_check(const std::vector<FourierLoop>& generators, const ConstraintSpec& spec, int samples,
                                 double residual_tol) {
  if (spec.family == Family::AdHoc4 || spec.family == Family::AdHoc5 || spec.family == Family::AdHoc6) {
    throw InapplicableBoundError("no norm estimate is available for the ad-hoc vertical symmetries");
  }
  if (static_cast<int>(generators.size()) != spec.generator_count()) {
    throw ArityError("norm_bound_check: generator count does not match the spec");
  }
  const auto sys = compile(spec, default_resolution(spec, generators.front().k_max()));
  const double res = residual(sys, generators);
  if (res > residual_tol) {
    throw InapplicableBoundError("generators violate the spec (residual " + std::to_string(res) + ")");
  }

  NormBoundReport report;
  const double period = generators.front().period();
  const double c = std::sqrt(3.0 * period) / 4.0;
  for (std::size_t g = 0; g < generators.size(); ++g) {
    NormBound b;
    b.label = "generator " + std::to_string(g + 1);
    b.sup_norm = sup_norm({&generators[g]}, samples);
    b.bound = c * std::sqrt(velocity_l2_squared(generators[g]));
    b.margin = b.bound - b.sup_norm;
    report.bounds.push_back(b);

    for (int j = 0; j < samples; ++j) {
      const double t = period * j / samples;
      report.quarter_period_residual =
          std::max(report.quarter_period_residual,
                   std::abs(evaluate(generators[g], t)(1) + evaluate(generators[g], t + 0.25 * period)(1)));
    }
  }

  if (spec.family == Family::Mixed3) {
    const auto bodies = body_layout(spec);
    const auto it = std::find_if(bodies.begin(), bodies.end(), [](const BodyRef& r) { return r.group == 1; });
    const FourierLoop partner = flip_coordinates(time_shift(generators[0], it->shift), it->signs);
    NormBound b;
    b.label = "pair (q, Q)";
    b.sup_norm = sup_norm({&generators[0], &partner}, samples);
    b.bound = std::sqrt(3.0 * period) / 2.0 *
              std::sqrt(velocity_l2_squared(generators[0]) + velocity_l2_squared(partner));
    b.margin = b.bound - b.sup_norm;
    report.bounds.push_back(b);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Classification

std::string classification_name(Classification c) {
  switch (c) {
    case Classification::NonCollision: return "non-collision";
    case Classification::GeneralizedCandidate: return "generalized-candidate";
    case Classification::NotASolution: return "not-a-solution";
  }
  return "unknown";
}

int classification_rank(Classification c) {
  switch (c) {
    case Classification::NonCollision: return 2;
    case Classification::GeneralizedCandidate: return 1;
    case Classification::NotASolution: return 0;
  }
  return 0;
}

double kinematic_equation_residual(const std::vector<FourierLoop>& bodies, const MassSystem& sys, int samples,
                                   double exclusion_radius) {
  if (bodies.size() < 2) {
    double worst = 0.0;
    for (int j = 0; j < samples && !bodies.empty(); ++j) {
      worst = std::max(worst, acceleration(bodies[0], bodies[0].period() * j / samples).norm());
    }
    return worst;
  }
  const double period = bodies.front().period();
  double worst = 0.0, scale = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double t = period * j / samples;
    const Configuration q = loop_positions(bodies, t);
    if (min_pair_separation(q) < exclusion_radius) continue;
    const Configuration f = force_field(q, sys);
    for (std::size_t b = 0; b < bodies.size(); ++b) {
      const Eigen::VectorXd lhs = sys.masses[b] * acceleration(bodies[b], t);
      worst = std::max(worst, (lhs - f.row(static_cast<Eigen::Index>(b)).transpose()).norm());
      scale = std::max(scale, f.row(static_cast<Eigen::Index>(b)).norm());
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

VerificationReport classify(const std::vector<FourierLoop>& bodies, const MassSystem& sys, const Tolerances& tol,
                            int steps, const ConstraintSpec* spec, const std::vector<FourierLoop>* generators) {
  VerificationReport r;
  r.steps = steps;
  if (bodies.empty()) return r;
  const double period = bodies.front().period();
  r.collisions = collision_diagnostics(bodies, tol.collision_threshold);

  try {
    const auto traj = integrate(initial_state(bodies), sys, period, steps, tol.abort_threshold);
    r.integration_completed = true;
    r.periodicity_residual = periodicity_residual(traj);
    r.energy = energy_profile(traj, sys);
    r.energy_constant = r.energy.mean;
    const auto traj_diag = collision_diagnostics(traj, tol.collision_threshold);
    if (traj_diag.min_separation < r.collisions.min_separation) {
      r.collisions.min_separation = traj_diag.min_separation;
      r.collisions.time_of_min = traj_diag.time_of_min;
      r.collisions.closest_pair = traj_diag.closest_pair;
    }
  } catch (const CollisionAbort& e) {
    r.abort_message = e.what();
    r.periodicity_residual = std::numeric_limits<double>::infinity();
    r.energy.relative_variation = std::numeric_limits<double>::infinity();
  }

  constexpr int kKinematicSamples = 1024;
  try {
    r.kinematic_equation_residual = kinematic_equation_residual(bodies, sys, kKinematicSamples, tol.exclusion_radius);
    const auto kin = kinematic_energy_profile(bodies, sys, kKinematicSamples);
    r.kinematic_energy_variation = kin.relative_variation;
    if (!r.integration_completed) r.energy_constant = kin.mean;
  } catch (const Error&) {
    r.kinematic_equation_residual = std::numeric_limits<double>::infinity();
    r.kinematic_energy_variation = std::numeric_limits<double>::infinity();
  }

  if (spec && generators) {
    try {
      r.norm_bounds = norm_bound_check(*generators, *spec);
    } catch (const InapplicableBoundError&) {
    }
  }

  const bool dynamic_ok = r.integration_completed && r.periodicity_residual < tol.periodicity &&
                          r.energy.relative_variation < tol.energy;
  const bool kinematic_ok =
      r.kinematic_equation_residual < tol.periodicity && r.kinematic_energy_variation < tol.energy;
  if (dynamic_ok && r.collisions.min_separation > tol.collision_threshold) {
    r.classification = Classification::NonCollision;
  } else if (r.collisions.measure <= tol.measure && (dynamic_ok || kinematic_ok)) {
    r.classification = Classification::GeneralizedCandidate;
  } else {
    r.classification = Classification::NotASolution;
  }
  return r;
}

}  // namespace choreo
