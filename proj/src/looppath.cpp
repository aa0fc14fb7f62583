#include "choreo/looppath.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "choreo/error.hpp"

namespace choreo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Phase fraction t/T reduced to [0, 1).
double phase_fraction(double t, double period) {
  double r = std::fmod(t, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r / period;
}

}  // namespace

FourierLoop::FourierLoop(double period, int dim, int k_max)
    : period_(period), dim_(dim), k_max_(k_max),
      coeffs_(static_cast<std::size_t>(dim) * (2 * k_max + 1), 0.0) {
  if (!(period > 0.0)) throw DomainError("FourierLoop: period must be positive");
  if (dim < 1) throw DimensionError("FourierLoop: dim must be positive");
  if (k_max < 1) throw DomainError("FourierLoop: k_max must be at least 1");
}

double FourierLoop::angular_frequency() const noexcept { return kTwoPi / period_; }

int FourierLoop::highest_active_harmonic() const {
  int top = 0;
  for (int c = 0; c < dim_; ++c) {
    for (int k = 1; k <= k_max_; ++k) {
      if (cos_coeff(c, k) != 0.0 || sin_coeff(c, k) != 0.0) top = std::max(top, k);
    }
  }
  return top;
}

namespace {

// 0: value, 1: first derivative, 2: second derivative.
Eigen::VectorXd evaluate_order(const FourierLoop& loop, double t, int order) {
  const double s = phase_fraction(t, loop.period());
  const double w = loop.angular_frequency();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(loop.dim());
  for (int c = 0; c < loop.dim(); ++c) {
    double acc = order == 0 ? loop.constant(c) : 0.0;
    for (int k = 1; k <= loop.k_max(); ++k) {
      const double theta = kTwoPi * std::fmod(k * s, 1.0);
      const double cs = std::cos(theta);
      const double sn = std::sin(theta);
      const double a = loop.cos_coeff(c, k);
      const double b = loop.sin_coeff(c, k);
      const double kw = k * w;
      switch (order) {
        case 0: acc += a * cs + b * sn; break;
        case 1: acc += kw * (b * cs - a * sn); break;
        default: acc -= kw * kw * (a * cs + b * sn); break;
      }
    }
    out(c) = acc;
  }
  return out;
}

}  // namespace

Eigen::VectorXd evaluate(const FourierLoop& loop, double t) { return evaluate_order(loop, t, 0); }
Eigen::VectorXd velocity(const FourierLoop& loop, double t) { return evaluate_order(loop, t, 1); }
Eigen::VectorXd acceleration(const FourierLoop& loop, double t) { return evaluate_order(loop, t, 2); }

Eigen::MatrixXd synthesis_matrix(int k_max, int m_samples) {
  Eigen::MatrixXd s(m_samples, 2 * k_max + 1);
  for (int j = 0; j < m_samples; ++j) {
    s(j, 0) = 1.0;
    for (int k = 1; k <= k_max; ++k) {
      // Reduce k*j mod M first so the angle is exact on the lattice.
      const double theta = kTwoPi * static_cast<double>((static_cast<long>(k) * j) % m_samples) / m_samples;
      s(j, 2 * k - 1) = std::cos(theta);
      s(j, 2 * k) = std::sin(theta);
    }
  }
  return s;
}

Eigen::MatrixXd derivative_synthesis_matrix(int k_max, int m_samples, double period) {
  const double w = kTwoPi / period;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m_samples, 2 * k_max + 1);
  for (int j = 0; j < m_samples; ++j) {
    for (int k = 1; k <= k_max; ++k) {
      const double theta = kTwoPi * static_cast<double>((static_cast<long>(k) * j) % m_samples) / m_samples;
      s(j, 2 * k - 1) = -k * w * std::sin(theta);
      s(j, 2 * k) = k * w * std::cos(theta);
    }
  }
  return s;
}

SampleGrid to_grid(const FourierLoop& loop, int m_samples) {
  if (m_samples < 1) throw DomainError("to_grid: sample count must be positive");
  const Eigen::MatrixXd s = synthesis_matrix(loop.k_max(), m_samples);
  SampleGrid grid;
  grid.period = loop.period();
  grid.values.resize(m_samples, loop.dim());
  const int width = loop.coeffs_per_coord();
  for (int c = 0; c < loop.dim(); ++c) {
    Eigen::Map<const Eigen::VectorXd> coeffs(loop.data().data() + static_cast<std::size_t>(c) * width, width);
    grid.values.col(c) = s * coeffs;
  }
  return grid;
}

FourierLoop from_grid(const SampleGrid& grid, int k_max) {
  const int m = grid.m_samples();
  if (m < 2 * k_max + 2) {
    throw AliasingError("from_grid: " + std::to_string(m) + " samples cannot resolve " +
                        std::to_string(k_max) + " harmonics (need at least " +
                        std::to_string(2 * k_max + 2) + ")");
  }
  const Eigen::MatrixXd s = synthesis_matrix(k_max, m);
  FourierLoop loop(grid.period, grid.dim(), k_max);
  for (int c = 0; c < grid.dim(); ++c) {
    const Eigen::VectorXd proj = s.transpose() * grid.values.col(c);
    loop.constant(c) = proj(0) / m;
    for (int k = 1; k <= k_max; ++k) {
      loop.cos_coeff(c, k) = 2.0 * proj(2 * k - 1) / m;
      loop.sin_coeff(c, k) = 2.0 * proj(2 * k) / m;
    }
  }
  return loop;
}

namespace {

template <typename AngleOf>
FourierLoop rotate_phases(const FourierLoop& loop, AngleOf angle_of) {
  FourierLoop out = loop;
  for (int k = 1; k <= loop.k_max(); ++k) {
    const double phi = angle_of(k);
    const double cs = std::cos(phi);
    const double sn = std::sin(phi);
    for (int c = 0; c < loop.dim(); ++c) {
      const double a = loop.cos_coeff(c, k);
      const double b = loop.sin_coeff(c, k);
      out.cos_coeff(c, k) = a * cs + b * sn;
      out.sin_coeff(c, k) = b * cs - a * sn;
    }
  }
  return out;
}

}  // namespace

FourierLoop time_shift(const FourierLoop& loop, double shift) {
  const double s = phase_fraction(shift, loop.period());
  if (s == 0.0) return loop;
  return rotate_phases(loop, [s](int k) { return kTwoPi * std::fmod(k * s, 1.0); });
}

FourierLoop time_shift(const FourierLoop& loop, Rational fraction_of_period) {
  const Rational f = fraction_of_period.wrapped();
  if (f.num() == 0) return loop;
  return rotate_phases(loop, [f](int k) {
    const std::int64_t r = (static_cast<std::int64_t>(k) * f.num()) % f.den();
    return kTwoPi * static_cast<double>(r) / static_cast<double>(f.den());
  });
}

FourierLoop time_reverse(const FourierLoop& loop) {
  FourierLoop out = loop;
  for (int c = 0; c < loop.dim(); ++c) {
    for (int k = 1; k <= loop.k_max(); ++k) out.sin_coeff(c, k) = -loop.sin_coeff(c, k);
  }
  return out;
}

FourierLoop flip_coordinates(const FourierLoop& loop, const std::vector<int>& signs) {
  if (static_cast<int>(signs.size()) != loop.dim()) {
    throw DimensionError("flip_coordinates: sign vector does not match loop dimension");
  }
  FourierLoop out = loop;
  const int width = loop.coeffs_per_coord();
  for (int c = 0; c < loop.dim(); ++c) {
    if (signs[c] >= 0) continue;
    for (int i = 0; i < width; ++i) out.data()[static_cast<std::size_t>(c) * width + i] *= -1.0;
  }
  return out;
}

FourierLoop dilate(const FourierLoop& loop, double factor) {
  FourierLoop out = loop;
  for (double& v : out.data()) v *= factor;
  return out;
}

double velocity_l2_squared(const FourierLoop& loop) {
  const double w = loop.angular_frequency();
  double sum = 0.0;
  for (int c = 0; c < loop.dim(); ++c) {
    for (int k = 1; k <= loop.k_max(); ++k) {
      const double a = loop.cos_coeff(c, k);
      const double b = loop.sin_coeff(c, k);
      sum += static_cast<double>(k) * k * (a * a + b * b);
    }
  }
  return 0.5 * loop.period() * w * w * sum;
}

double kinetic_integral(const FourierLoop& loop, double mass) {
  return 0.5 * mass * velocity_l2_squared(loop);
}

FourierLoop subperiod_replicate(const FourierLoop& loop, int z, std::optional<int> capacity) {
  if (z < 1) throw DomainError("subperiod_replicate: z must be a positive integer");
  const int needed = z * loop.highest_active_harmonic();
  const int k_out = capacity.value_or(z * loop.k_max());
  if (needed > k_out) {
    throw CapacityError("subperiod_replicate: harmonic " + std::to_string(needed) +
                        " exceeds capacity " + std::to_string(k_out));
  }
  FourierLoop out(loop.period(), loop.dim(), std::max(k_out, 1));
  for (int c = 0; c < loop.dim(); ++c) {
    out.constant(c) = loop.constant(c);
    for (int k = 1; k <= loop.k_max() && z * k <= k_out; ++k) {
      out.cos_coeff(c, z * k) = loop.cos_coeff(c, k);
      out.sin_coeff(c, z * k) = loop.sin_coeff(c, k);
    }
  }
  return out;
}

}  // namespace choreo
