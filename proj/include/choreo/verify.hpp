#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "choreo/looppath.hpp"
#include "choreo/potential.hpp"
#include "choreo/symmetry.hpp"

namespace choreo {

struct StateVector {
  Configuration positions;
  Configuration velocities;
  double time = 0.0;
};

/// Positions and velocities of body loops at t = 0.
StateVector initial_state(const std::vector<FourierLoop>& bodies);

/// Classical RK4 on m_i q_i'' = grad_i U (unregularized). Returns steps + 1
/// states. Throws CollisionAbort when a separation drops below `abort_threshold`.
std::vector<StateVector> integrate(const StateVector& start, const MassSystem& sys, double duration, int steps,
                                   double abort_threshold = 1e-8);

/// |state(end) - state(0)| / |state(0)| over positions and velocities together.
double periodicity_residual(const std::vector<StateVector>& trajectory);
double periodicity_residual(const StateVector& first, const StateVector& last);

struct EnergyProfile {
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  /// (max - min) / |mean|.
  double relative_variation = 0.0;
};

double total_energy(const StateVector& s, const MassSystem& sys);
EnergyProfile energy_profile(const std::vector<StateVector>& trajectory, const MassSystem& sys);
/// Energy of the loops themselves on a uniform grid (no integration).
EnergyProfile kinematic_energy_profile(const std::vector<FourierLoop>& bodies, const MassSystem& sys, int samples);

struct CollisionDiagnostics {
  double min_separation = 0.0;
  double time_of_min = 0.0;
  std::pair<int, int> closest_pair{-1, -1};
  /// Fraction of sample times with some separation below the threshold.
  double measure = 0.0;
  /// Maximal runs [t_begin, t_end] of sub-threshold sample times.
  std::vector<std::pair<double, double>> windows;
  int samples = 0;
};

CollisionDiagnostics collision_diagnostics(const std::vector<FourierLoop>& bodies, double threshold,
                                           int samples = 4096);
CollisionDiagnostics collision_diagnostics(const std::vector<StateVector>& trajectory, double threshold);

/// sup |q| <= c sqrt(int |q'|^2) for one loop.
struct NormBound {
  std::string label;
  double sup_norm = 0.0;
  double bound = 0.0;
  double margin = 0.0;
};

struct NormBoundReport {
  std::vector<NormBound> bounds;
  /// max |q2(t) + q2(t + T/4)| on the grid; informational only.
  double quarter_period_residual = 0.0;
  bool all_nonnegative() const;
};

/// Planar/Klein, symmetry 1-2 and double-eight generators use c = sqrt(3T)/4;
/// symmetry-3 additionally checks X = (q, Q) with c = sqrt(3T)/2. Throws
/// InapplicableBoundError for the ad-hoc families or when the generators
/// violate the spec.
NormBoundReport norm_bound_check(const std::vector<FourierLoop>& generators, const ConstraintSpec& spec,
                                 int samples = 4096, double residual_tol = 1e-8);

struct Tolerances {
  double collision_threshold = 1e-5;
  double periodicity = 1e-4;
  double energy = 1e-6;
  double measure = 0.01;
  double abort_threshold = 1e-8;
  /// Kinematic checks for generalized candidates skip times closer than this
  /// to a collision. Not a tolerance that gets loosened.
  double exclusion_radius = 1e-3;
};

enum class Classification { NonCollision, GeneralizedCandidate, NotASolution };

std::string classification_name(Classification c);
/// Higher is stronger: NonCollision > GeneralizedCandidate > NotASolution.
int classification_rank(Classification c);

struct VerificationReport {
  double periodicity_residual = 0.0;
  EnergyProfile energy;
  /// Reported value of the energy constant C (mean of the profile).
  double energy_constant = 0.0;
  CollisionDiagnostics collisions;
  bool integration_completed = false;
  std::string abort_message;
  double kinematic_equation_residual = 0.0;
  double kinematic_energy_variation = 0.0;
  std::optional<NormBoundReport> norm_bounds;
  int steps = 0;
  Classification classification = Classification::NotASolution;
};

/// Integrates one period from the loops' initial state and combines it with
/// grid diagnostics of the loops. `spec` enables the norm-bound audit.
VerificationReport classify(const std::vector<FourierLoop>& bodies, const MassSystem& sys, const Tolerances& tol = {},
                            int steps = 20000, const ConstraintSpec* spec = nullptr,
                            const std::vector<FourierLoop>* generators = nullptr);

/// max over off-collision grid times of |m q'' - grad U| / max |grad U|.
double kinematic_equation_residual(const std::vector<FourierLoop>& bodies, const MassSystem& sys, int samples,
                                   double exclusion_radius);

}  // namespace choreo
