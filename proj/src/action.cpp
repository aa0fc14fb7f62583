#include "choreo/action.hpp"

#include <cmath>
#include <numbers>
#include <limits>
#include <string>

#include "choreo/error.hpp"

namespace choreo {

ActionProblem::ActionProblem(MassSystem system, const ConstraintSpec& spec, Resolution res)
    : system_(std::move(system)), constraints_(compile(spec, res)),
      zero_sum_(compile(spec, res, RelationFilter::ZeroSumOnly)) {
  system_.validate();
  if (system_.n_bodies() != spec.body_count()) {
    throw ValidationError("masses", "masses: spec needs " + std::to_string(spec.body_count()) + " bodies, got " +
                                        std::to_string(system_.n_bodies()));
  }
  if (system_.dim != spec.dim()) throw DimensionError("mass system dimension does not match the spec");
  generator_mass_.assign(static_cast<std::size_t>(constraints_.generator_count()), 0.0);
  const auto& bodies = constraints_.bodies();
  for (std::size_t b = 0; b < bodies.size(); ++b) generator_mass_[bodies[b].generator] += system_.masses[b];
}

std::vector<FourierLoop> ActionProblem::generators(const Eigen::VectorXd& x) const {
  return unpack_generators(x, constraints_, system_.period);
}

std::vector<FourierLoop> ActionProblem::bodies(const Eigen::VectorXd& x) const {
  return body_trajectories(spec(), generators(x));
}

namespace {

double kinetic_part(const ActionProblem& p, const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
  const auto& sys = p.constraints();
  const double w = 2.0 * std::numbers::pi / p.period();
  const double scale = 0.5 * p.period() * w * w;
  long double sum = 0.0L;
  for (int g = 0; g < sys.generator_count(); ++g) {
    const double m = p.generator_masses()[g];
    for (int c = 0; c < sys.dim(); ++c) {
      const auto off = static_cast<Eigen::Index>(sys.block_offset(g, c));
      for (int k = 1; k <= sys.resolution().k_max; ++k) {
        const double kk = static_cast<double>(k) * k;
        for (int s = 0; s < 2; ++s) {
          const Eigen::Index i = off + 2 * k - 1 + s;
          sum += 0.5 * m * scale * kk * x(i) * x(i);
          if (grad) (*grad)(i) += m * scale * kk * x(i);
        }
      }
    }
  }
  return static_cast<double>(sum);
}

struct PotentialResult {
  long double integral = 0.0L;
  double min_separation = std::numeric_limits<double>::infinity();
};

// Trapezoid quadrature of the regularized potential on M nodes, accumulated in
// extended precision so line searches near a minimum see a smooth value. When
// sample_grad is given it receives dJ/d(generator samples), one M x dim block
// per generator.
PotentialResult potential_on_grid(const ActionProblem& p, const std::vector<Eigen::MatrixXd>& samples,
                                  const RegularizationParams& reg, std::vector<Eigen::MatrixXd>* sample_grad) {
  const auto& bodies = p.constraints().bodies();
  const auto& masses = p.system().masses;
  const double alpha = p.system().exponent;
  const int m = static_cast<int>(samples.front().rows());
  const int dim = static_cast<int>(samples.front().cols());
  const int n = static_cast<int>(bodies.size());
  const double weight = p.period() / m;

  std::vector<int> shift(static_cast<std::size_t>(n));
  for (int b = 0; b < n; ++b) {
    const Rational s = bodies[b].shift.wrapped();
    shift[b] = static_cast<int>((s.num() * m) / s.den());
  }

  PotentialResult out;
  Eigen::MatrixXd pos(n, dim);
  for (int j = 0; j < m; ++j) {
    for (int b = 0; b < n; ++b) {
      const int row = (j + shift[b]) % m;
      for (int c = 0; c < dim; ++c) pos(b, c) = bodies[b].signs[c] * samples[bodies[b].generator](row, c);
    }
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        const Eigen::RowVectorXd diff = pos.row(a) - pos.row(b);
        const double r = diff.norm();
        out.min_separation = std::min(out.min_separation, r);
        if (!(r > 0.0)) {
          throw CollisionError(a, b, "bodies " + std::to_string(a) + " and " + std::to_string(b) +
                                         " coincide at grid node " + std::to_string(j));
        }
        out.integral += weight * regularized_pair_potential(masses[a], masses[b], r, alpha, reg);
        if (sample_grad) {
          const double slope = weight * regularized_pair_slope(masses[a], masses[b], r, alpha, reg) / r;
          const int ra = (j + shift[a]) % m, rb = (j + shift[b]) % m;
          for (int c = 0; c < dim; ++c) {
            const double g = slope * diff(c);
            (*sample_grad)[bodies[a].generator](ra, c) += bodies[a].signs[c] * g;
            (*sample_grad)[bodies[b].generator](rb, c) -= bodies[b].signs[c] * g;
          }
        }
      }
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> samples_at(const ActionProblem& p, const Eigen::VectorXd& x, const Eigen::MatrixXd& s) {
  const auto& sys = p.constraints();
  const int width = sys.coeffs_per_coord();
  std::vector<Eigen::MatrixXd> out;
  for (int g = 0; g < sys.generator_count(); ++g) {
    Eigen::MatrixXd v(s.rows(), sys.dim());
    for (int c = 0; c < sys.dim(); ++c) v.col(c) = s * x.segment(static_cast<Eigen::Index>(sys.block_offset(g, c)), width);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

ActionReport evaluate_action(const ActionProblem& p, const Eigen::VectorXd& x, const RegularizationParams& reg,
                             Eigen::VectorXd* gradient) {
  const auto& sys = p.constraints();
  if (x.size() != sys.full_size()) throw DimensionError("coefficient vector has the wrong length");
  Eigen::VectorXd grad;
  if (gradient) grad = Eigen::VectorXd::Zero(x.size());

  ActionReport report;
  report.kinetic = kinetic_part(p, x, gradient ? &grad : nullptr);

  const auto samples = sys.generator_samples(x);
  if (p.include_potential && sys.bodies().size() > 1) {
    std::vector<Eigen::MatrixXd> sample_grad;
    if (gradient) sample_grad.assign(samples.size(), Eigen::MatrixXd::Zero(samples[0].rows(), samples[0].cols()));
    const auto pot = potential_on_grid(p, samples, reg, gradient ? &sample_grad : nullptr);
    report.potential = static_cast<double>(pot.integral);
    report.min_separation = pot.min_separation;
    if (gradient) {
      const int width = sys.coeffs_per_coord();
      for (int g = 0; g < sys.generator_count(); ++g) {
        for (int c = 0; c < sys.dim(); ++c) {
          grad.segment(static_cast<Eigen::Index>(sys.block_offset(g, c)), width) +=
              sys.synthesis().transpose() * sample_grad[g].col(c);
        }
      }
    }
  } else {
    report.min_separation = sys.bodies().size() > 1 ? potential_on_grid(p, samples, {}, nullptr).min_separation
                                                    : std::numeric_limits<double>::infinity();
  }
  report.action = report.kinetic + report.potential;
  if (gradient) {
    *gradient = sys.project(grad);
    report.gradient_norm = gradient->norm();
  }
  return report;
}

double action_value(const ActionProblem& p, const Eigen::VectorXd& x, const RegularizationParams& reg) {
  return evaluate_action(p, x, reg).action;
}

Eigen::VectorXd action_gradient(const ActionProblem& p, const Eigen::VectorXd& x, const RegularizationParams& reg) {
  Eigen::VectorXd g;
  evaluate_action(p, x, reg, &g);
  return g;
}

double potential_integral(const ActionProblem& p, const Eigen::VectorXd& x, const RegularizationParams& reg,
                          int m_samples) {
  if (m_samples % p.spec().lattice_modulus() != 0) {
    throw ModulusError(static_cast<long>(p.spec().lattice_modulus()), "quadrature size is not a lattice multiple");
  }
  const auto s = synthesis_matrix(p.constraints().resolution().k_max, m_samples);
  return static_cast<double>(potential_on_grid(p, samples_at(p, x, s), reg, nullptr).integral);
}

double discretization_error_estimate(const ActionProblem& p, const Eigen::VectorXd& x,
                                     const RegularizationParams& reg) {
  const int m = p.constraints().resolution().m_samples;
  return std::abs(potential_integral(p, x, reg, 2 * m) - potential_integral(p, x, reg, m));
}

double naive_kinetic(const ActionProblem& p, const Eigen::VectorXd& x) {
  const auto loops = p.bodies(x);
  double sum = 0.0;
  for (std::size_t b = 0; b < loops.size(); ++b) sum += kinetic_integral(loops[b], p.system().masses[b]);
  return sum;
}

Eigen::VectorXd center_of_mass_projection(const ActionProblem& p, const Eigen::VectorXd& x) {
  return p.zero_sum_constraints().project(x);
}

}  // namespace choreo
