#include "choreo/potential.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "choreo/error.hpp"

namespace choreo {

double MassSystem::total_mass() const noexcept {
  double sum = 0.0;
  for (double m : masses) sum += m;
  return sum;
}

void MassSystem::validate() const {
  if (masses.empty()) throw ValidationError("masses", "masses: at least one body is required");
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] > 0.0) || !std::isfinite(masses[i])) {
      throw ValidationError("masses", "masses: entry " + std::to_string(i) + " must be positive");
    }
  }
  if (dim != 2 && dim != 3) throw ValidationError("dim", "dim must be 2 or 3");
  if (!(period > 0.0) || !std::isfinite(period)) throw ValidationError("period", "period must be positive");
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw ValidationError("exponent", "exponent must be positive");
  }
}

double pair_potential(double mi, double mj, double r, double alpha) {
  if (!(r > 0.0)) throw DomainError("pair_potential: non-positive separation (collision)");
  return mi * mj / std::pow(r, alpha);
}

double barrier_taper(double r, double delta) {
  if (delta <= 0.0 || r >= delta) return 0.0;
  const double inner = 0.5 * delta;
  if (r <= inner) return 1.0;
  const double s = (r - inner) / inner;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * s));
}

double barrier_taper_slope(double r, double delta) {
  const double inner = 0.5 * delta;
  if (delta <= 0.0 || r >= delta || r <= inner) return 0.0;
  const double s = (r - inner) / inner;
  return -0.5 * std::numbers::pi / inner * std::sin(std::numbers::pi * s);
}

double regularized_pair_potential(double mi, double mj, double r, double alpha,
                                  const RegularizationParams& reg) {
  const double base = pair_potential(mi, mj, r, alpha);
  const double phi = barrier_taper(r, reg.delta);
  return phi == 0.0 ? base : base + phi / (r * r);
}

double regularized_pair_slope(double mi, double mj, double r, double alpha,
                              const RegularizationParams& reg) {
  if (!(r > 0.0)) throw DomainError("regularized_pair_slope: non-positive separation (collision)");
  double slope = -alpha * mi * mj / std::pow(r, alpha + 1.0);
  const double phi = barrier_taper(r, reg.delta);
  if (phi != 0.0 || barrier_taper_slope(r, reg.delta) != 0.0) {
    slope += barrier_taper_slope(r, reg.delta) / (r * r) - 2.0 * phi / (r * r * r);
  }
  return slope;
}

namespace {

double pair_distance(const Configuration& q, int i, int j) { return (q.row(i) - q.row(j)).norm(); }

[[noreturn]] void throw_collision(int i, int j) {
  throw CollisionError(i, j,
                       "bodies " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
}

}  // namespace

double total_potential(const Configuration& positions, const MassSystem& sys,
                       const RegularizationParams& reg) {
  const int n = static_cast<int>(positions.rows());
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double r = pair_distance(positions, i, j);
      if (!(r > 0.0)) throw_collision(i, j);
      sum += regularized_pair_potential(sys.masses[i], sys.masses[j], r, sys.exponent, reg);
    }
  }
  return sum;
}

Configuration force_field(const Configuration& positions, const MassSystem& sys,
                          const RegularizationParams& reg) {
  const int n = static_cast<int>(positions.rows());
  Configuration grad = Configuration::Zero(n, positions.cols());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::RowVectorXd diff = positions.row(i) - positions.row(j);
      const double r = diff.norm();
      if (!(r > 0.0)) throw_collision(i, j);
      const double slope = regularized_pair_slope(sys.masses[i], sys.masses[j], r, sys.exponent, reg);
      const Eigen::RowVectorXd g = (slope / r) * diff;
      grad.row(i) += g;
      grad.row(j) -= g;
    }
  }
  return grad;
}

double min_pair_separation(const Configuration& positions) {
  const int n = static_cast<int>(positions.rows());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) best = std::min(best, pair_distance(positions, i, j));
  }
  return best;
}

bool satisfies_strong_force(double alpha) { return alpha >= 2.0; }

}  // namespace choreo
