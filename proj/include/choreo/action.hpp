#pragma once

#include <Eigen/Dense>
#include <vector>

#include "choreo/looppath.hpp"
#include "choreo/potential.hpp"
#include "choreo/symmetry.hpp"

namespace choreo {

/// Masses plus compiled constraints: everything needed to evaluate the action
/// on a stacked generator coefficient vector. Masses follow body_layout order.
class ActionProblem {
 public:
  ActionProblem(MassSystem system, const ConstraintSpec& spec, Resolution res);

  const MassSystem& system() const noexcept { return system_; }
  const LinearConstraintSystem& constraints() const noexcept { return constraints_; }
  const LinearConstraintSystem& zero_sum_constraints() const noexcept { return zero_sum_; }
  const ConstraintSpec& spec() const noexcept { return constraints_.spec(); }
  double period() const noexcept { return system_.period; }

  /// Drops the potential term (pure kinetic functional); used by tests.
  bool include_potential = true;

  /// Sum of body masses attached to each generator.
  const std::vector<double>& generator_masses() const noexcept { return generator_mass_; }

  std::vector<FourierLoop> generators(const Eigen::VectorXd& x) const;
  std::vector<FourierLoop> bodies(const Eigen::VectorXd& x) const;

 private:
  MassSystem system_;
  LinearConstraintSystem constraints_;
  LinearConstraintSystem zero_sum_;
  std::vector<double> generator_mass_;
};

/// Free coordinates y of the feasible subspace; the full vector is x = B y.
struct ReducedCoordinates {
  Eigen::VectorXd y;

  Eigen::VectorXd full(const ActionProblem& p) const { return p.constraints().expand(y); }
  static ReducedCoordinates from_full(const ActionProblem& p, const Eigen::VectorXd& x) {
    return {p.constraints().reduce(x)};
  }
};

struct ActionReport {
  double action = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  /// Norm of the projected gradient; left at 0 when no gradient was requested.
  double gradient_norm = 0.0;
  double min_separation = 0.0;
};

/// Value and, when `gradient` is non-null, the projected gradient with respect
/// to the full coefficient vector. Throws CollisionError on an exact coincidence.
ActionReport evaluate_action(const ActionProblem& p, const Eigen::VectorXd& x, const RegularizationParams& reg,
                             Eigen::VectorXd* gradient = nullptr);

double action_value(const ActionProblem& p, const Eigen::VectorXd& x, const RegularizationParams& reg = {});
Eigen::VectorXd action_gradient(const ActionProblem& p, const Eigen::VectorXd& x,
                                const RegularizationParams& reg = {});

/// Potential integral recomputed with `m_samples` quadrature nodes (must be a
/// multiple of the lattice modulus).
double potential_integral(const ActionProblem& p, const Eigen::VectorXd& x, const RegularizationParams& reg,
                          int m_samples);
/// |potential at 2M - potential at M|.
double discretization_error_estimate(const ActionProblem& p, const Eigen::VectorXd& x,
                                     const RegularizationParams& reg = {});

/// Kinetic part summed body by body (no group sharing); reference for tests.
double naive_kinetic(const ActionProblem& p, const Eigen::VectorXd& x);

/// Orthogonal projection onto the zero-sum relations alone.
Eigen::VectorXd center_of_mass_projection(const ActionProblem& p, const Eigen::VectorXd& x);

}  // namespace choreo
