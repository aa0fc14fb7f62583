#pragma once

#include <Eigen/Dense>
#include <vector>

namespace choreo {

/// Body positions, one row per body, one column per spatial coordinate.
using Configuration = Eigen::MatrixXd;

/// Masses, spatial dimension, period and potential exponent of one problem.
/// The gravitational constant is 1.
struct MassSystem {
  std::vector<double> masses;
  int dim = 2;
  double period = 6.283185307179586;
  double exponent = 1.0;

  int n_bodies() const noexcept { return static_cast<int>(masses.size()); }
  double total_mass() const noexcept;
  /// Throws ValidationError naming the offending field.
  void validate() const;
};

/// Strong-force barrier radius; delta == 0 disables the barrier.
struct RegularizationParams {
  double delta = 0.0;
};

/// m_i m_j / r^alpha. Throws DomainError for r <= 0.
double pair_potential(double mi, double mj, double r, double alpha);

/// Cosine ramp: 1 for r <= delta/2, 0 for r >= delta, C^1 in between.
double barrier_taper(double r, double delta);
double barrier_taper_slope(double r, double delta);

/// pair_potential + taper(r)/r^2.
double regularized_pair_potential(double mi, double mj, double r, double alpha,
                                  const RegularizationParams& reg);
/// d/dr of regularized_pair_potential.
double regularized_pair_slope(double mi, double mj, double r, double alpha,
                              const RegularizationParams& reg);

/// Sum over unordered pairs. Throws CollisionError on a coincident pair.
double total_potential(const Configuration& positions, const MassSystem& sys,
                       const RegularizationParams& reg = {});

/// Per-body gradient of the (regularized) total potential. With U >= 0 this is
/// the attractive force: m_i q_i'' = grad_i U.
Configuration force_field(const Configuration& positions, const MassSystem& sys,
                          const RegularizationParams& reg = {});

/// Smallest pairwise distance; +inf for fewer than two bodies.
double min_pair_separation(const Configuration& positions);

/// True when the homogeneous potential already blows up at least like 1/r^2.
bool satisfies_strong_force(double alpha);

}  // namespace choreo
