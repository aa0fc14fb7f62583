#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "choreo/action.hpp"

namespace choreo {

struct ContinuationSchedule {
  double delta_start = 0.5;
  double factor = 0.5;
  double delta_floor = 1e-3;
  bool polish = true;

  /// Throws ValidationError naming "schedule.*".
  void validate() const;
  /// delta_start, delta_start*factor, ... while >= delta_floor.
  std::vector<double> ladder() const;
};

struct OptimizerParams {
  int max_iterations = 5000;
  /// Stopping threshold on |P grad| / sqrt(free coefficients), final stage.
  double gradient_tolerance = 1e-6;
  /// Same for the intermediate regularized stages.
  double stage_tolerance = 1e-5;
  double armijo_c1 = 1e-4;
  double contraction = 0.5;
  int max_backtracks = 60;
  int memory = 12;
  std::uint64_t seed = 1;
  /// Emit a progress event every this many iterations (0: only at stage end).
  int progress_every = 100;

  void validate() const;
};

struct ProgressEvent {
  int stage = 0;
  double delta = 0.0;
  int iteration = 0;
  double action = 0.0;
  double gradient_norm = 0.0;
  double min_separation = 0.0;
};

using ProgressFn = std::function<void(const ProgressEvent&)>;

/// Prints "stage=... delta=... iter=... action=... grad=... minsep=..." to stderr.
ProgressFn stderr_progress();

struct StageReport {
  double delta = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double action_start = 0.0;
  double action = 0.0;
  /// Scaled: |P grad| / sqrt(free coefficients).
  double gradient_norm = 0.0;
  double min_separation = 0.0;
  double constraint_residual = 0.0;
  bool converged = false;
  bool stagnated = false;
  std::string message;
};

struct StageResult {
  StageReport report;
  Eigen::VectorXd x;
  /// Action after every accepted step, starting with the initial value.
  std::vector<double> accepted_actions;
};

struct SolveReport {
  Eigen::VectorXd x;
  std::vector<StageReport> stages;
  bool converged = false;
  bool polished = false;
  /// "candidate-non-collision", "near-collision", "not-converged" or "failed".
  std::string outcome;
  int failed_stage = -1;
  std::string failure;
  double wall_seconds = 0.0;
  ActionReport final;
};

/// Lissajous eight (sin wt, 0.5 sin 2wt) per generator (the second one upright and
/// flattened for the perpendicular double eight), small z component for
/// spatial families, a seeded perturbation, then projection.
Eigen::VectorXd seed_curve(const ActionProblem& p, std::uint64_t seed, double perturbation = 0.01);

/// L-BFGS on the free coordinates with Armijo backtracking. Trial points that
/// collide or evaluate to non-finite values are treated as failed trials.
StageResult minimize_fixed_delta(const ActionProblem& p, const Eigen::VectorXd& x0, double delta,
                                 const OptimizerParams& params, double tolerance, const ProgressFn& progress = {},
                                 int stage_index = 0);

/// Runs the delta ladder with warm starts and an optional unregularized polish.
SolveReport solve_with_continuation(const ActionProblem& p, const Eigen::VectorXd& x0,
                                    const ContinuationSchedule& schedule, const OptimizerParams& params,
                                    const ProgressFn& progress = {});

/// Each body loop replaced by t -> lambda q(z t) with lambda = z^(-2/(alpha+2)),
/// which maps solutions of the homogeneous problem to solutions.
std::vector<FourierLoop> replicate_orbit(const std::vector<FourierLoop>& bodies, int z, double exponent);

}  // namespace choreo
