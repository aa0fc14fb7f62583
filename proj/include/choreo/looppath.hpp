#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "choreo/rational.hpp"

namespace choreo {

/// A closed T-periodic path in R^dim stored as a truncated trigonometric series
///
///   q_c(t) = a0 + sum_{k=1..K} a_k cos(k w t) + b_k sin(k w t),   w = 2 pi / T.
///
/// Each coordinate owns 2K+1 contiguous coefficients [a0, a1, b1, ..., aK, bK].
class FourierLoop {
 public:
  FourierLoop() = default;
  FourierLoop(double period, int dim, int k_max);

  double period() const noexcept { return period_; }
  int dim() const noexcept { return dim_; }
  int k_max() const noexcept { return k_max_; }
  int coeffs_per_coord() const noexcept { return 2 * k_max_ + 1; }
  double angular_frequency() const noexcept;

  double& constant(int coord) { return coeffs_[offset(coord)]; }
  double constant(int coord) const { return coeffs_[offset(coord)]; }
  double& cos_coeff(int coord, int k) { return coeffs_[offset(coord) + 2 * k - 1]; }
  double cos_coeff(int coord, int k) const { return coeffs_[offset(coord) + 2 * k - 1]; }
  double& sin_coeff(int coord, int k) { return coeffs_[offset(coord) + 2 * k]; }
  double sin_coeff(int coord, int k) const { return coeffs_[offset(coord) + 2 * k]; }

  /// All coefficients, coordinate-major.
  const std::vector<double>& data() const noexcept { return coeffs_; }
  std::vector<double>& data() noexcept { return coeffs_; }

  /// Highest harmonic with a non-zero coefficient (0 for a constant loop).
  int highest_active_harmonic() const;

  friend bool operator==(const FourierLoop&, const FourierLoop&) = default;

 private:
  std::size_t offset(int coord) const { return static_cast<std::size_t>(coord) * (2 * k_max_ + 1); }

  double period_ = 1.0;
  int dim_ = 0;
  int k_max_ = 0;
  std::vector<double> coeffs_;
};

/// Uniform samples t_j = j T / M, j = 0..M-1, one row per sample.
struct SampleGrid {
  double period = 1.0;
  Eigen::MatrixXd values;

  int m_samples() const noexcept { return static_cast<int>(values.rows()); }
  int dim() const noexcept { return static_cast<int>(values.cols()); }
  double time(int j) const noexcept { return period * j / m_samples(); }
};

Eigen::VectorXd evaluate(const FourierLoop& loop, double t);
Eigen::VectorXd velocity(const FourierLoop& loop, double t);
Eigen::VectorXd acceleration(const FourierLoop& loop, double t);

/// Matrix S with S(j, :) the basis row [1, cos wt_j, sin wt_j, ...] at t_j = jT/M.
Eigen::MatrixXd synthesis_matrix(int k_max, int m_samples);
/// Same for the time derivative (scaled by w = 2 pi / T).
Eigen::MatrixXd derivative_synthesis_matrix(int k_max, int m_samples, double period);

SampleGrid to_grid(const FourierLoop& loop, int m_samples);
/// Discrete Fourier analysis; requires M >= 2 K + 2 (throws AliasingError).
FourierLoop from_grid(const SampleGrid& grid, int k_max);

/// t -> q(t + shift).
FourierLoop time_shift(const FourierLoop& loop, double shift);
/// Exact variant for shifts that are rational multiples of the period.
FourierLoop time_shift(const FourierLoop& loop, Rational fraction_of_period);
/// t -> q(-t).
FourierLoop time_reverse(const FourierLoop& loop);
/// t -> diag(signs) q(t).
FourierLoop flip_coordinates(const FourierLoop& loop, const std::vector<int>& signs);
/// t -> factor * q(t).
FourierLoop dilate(const FourierLoop& loop, double factor);

/// (m/2) * integral over one period of |q'|^2, in closed form.
double kinetic_integral(const FourierLoop& loop, double mass);
/// Integral over one period of |q'|^2 (mass-free).
double velocity_l2_squared(const FourierLoop& loop);

/// t -> q(z t). The result carries z*K harmonics unless `capacity` caps it; a
/// harmonic beyond the cap raises CapacityError.
FourierLoop subperiod_replicate(const FourierLoop& loop, int z,
                                std::optional<int> capacity = std::nullopt);

}  // namespace choreo
