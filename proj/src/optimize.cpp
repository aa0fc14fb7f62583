#include "choreo/optimize.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <iostream>
#include <numbers>
#include <random>

#include "choreo/error.hpp"

namespace choreo {

void ContinuationSchedule::validate() const {
  if (!(delta_floor >= 0.0)) throw ValidationError("schedule.delta_floor", "delta_floor must be non-negative");
  if (!(delta_start > delta_floor)) throw ValidationError("schedule.delta_start", "delta_start must exceed delta_floor");
  if (!(factor > 0.0 && factor < 1.0)) throw ValidationError("schedule.factor", "factor must lie in (0, 1)");
}

std::vector<double> ContinuationSchedule::ladder() const {
  validate();
  std::vector<double> out;
  for (double d = delta_start; d >= delta_floor && d > 0.0; d *= factor) out.push_back(d);
  return out;
}

void OptimizerParams::validate() const {
  if (max_iterations < 1) throw ValidationError("optimizer.max_iterations", "max_iterations must be positive");
  if (!(gradient_tolerance > 0.0)) throw ValidationError("optimizer.gradient_tolerance", "tolerance must be positive");
  if (!(stage_tolerance > 0.0)) throw ValidationError("optimizer.stage_tolerance", "tolerance must be positive");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw ValidationError("optimizer.armijo_c1", "c1 must lie in (0, 1)");
  if (!(contraction > 0.0 && contraction < 1.0)) {
    throw ValidationError("optimizer.contraction", "contraction must lie in (0, 1)");
  }
  if (max_backtracks < 1) throw ValidationError("optimizer.max_backtracks", "max_backtracks must be positive");
  if (memory < 1) throw ValidationError("optimizer.memory", "memory must be positive");
}

ProgressFn stderr_progress() {
  return [](const ProgressEvent& e) {
    std::fprintf(stderr, "stage=%d delta=%.6g iter=%d action=%.12g grad=%.3e minsep=%.6g\n", e.stage, e.delta,
                 e.iteration, e.action, e.gradient_norm, e.min_separation);
  };
}

Eigen::VectorXd seed_curve(const ActionProblem& p, std::uint64_t seed, double perturbation) {
  const auto& sys = p.constraints();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(sys.full_size());
  const double a = 1.0, b = 0.5;
  const bool perpendicular = p.spec().family == Family::DoubleEightPerpendicular;
  for (int g = 0; g < sys.generator_count(); ++g) {
    const auto ox = static_cast<Eigen::Index>(sys.block_offset(g, 0));
    const auto oy = static_cast<Eigen::Index>(sys.block_offset(g, 1));
    if (perpendicular && g == 1) {
      // Upright and flattened; a plain quarter turn passes within 0.03 of group 1.
      x(ox + 4) = 0.5 * b;  // sin 2wt
      x(oy + 2) = a;        // sin wt
    } else {
      x(ox + 2) = a;
      x(oy + 4) = b;
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd noise(sys.full_size());
  const int width = sys.coeffs_per_coord();
  for (Eigen::Index i = 0; i < noise.size(); ++i) {
    const int harmonic = static_cast<int>(((i % width) + 1) / 2);
    noise(i) = normal(rng) / (1.0 + harmonic * harmonic);
  }
  x += perturbation * noise;

  if (sys.dim() == 3) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(sys.full_size());
    for (int g = 0; g < sys.generator_count(); ++g) {
      const auto oz = static_cast<Eigen::Index>(sys.block_offset(g, 2));
      for (int i = 1; i < width; ++i) {
        const int harmonic = (i + 1) / 2;
        z(oz + i) = normal(rng) / (harmonic * harmonic);
      }
    }
    z = sys.project(z);
    const double peak = z.cwiseAbs().maxCoeff();
    if (peak > 0.0) x += (0.05 / peak) * z;
  }
  return sys.project(x);
}

namespace {

struct Evaluation {
  bool ok = false;
  ActionReport report;
  Eigen::VectorXd grad_y;
};

Evaluation evaluate_reduced(const ActionProblem& p, const Eigen::VectorXd& y, const RegularizationParams& reg) {
  Evaluation e;
  try {
    Eigen::VectorXd g;
    e.report = evaluate_action(p, p.constraints().expand(y), reg, &g);
    e.grad_y = p.constraints().reduce(g);
    e.ok = std::isfinite(e.report.action) && e.grad_y.allFinite();
  } catch (const CollisionError&) {
    e.ok = false;
  } catch (const DomainError&) {
    e.ok = false;
  }
  return e;
}

// Kinetic Hessian restricted to the free coordinates; used as the initial
// inverse-Hessian model so high harmonics do not dominate the step.
Eigen::LLT<Eigen::MatrixXd> kinetic_preconditioner(const ActionProblem& p) {
  const auto& sys = p.constraints();
  const double w = 2.0 * std::numbers::pi / p.period();
  const double scale = 0.5 * p.period() * w * w;
  Eigen::VectorXd d = Eigen::VectorXd::Zero(sys.full_size());
  for (int g = 0; g < sys.generator_count(); ++g) {
    for (int c = 0; c < sys.dim(); ++c) {
      const auto off = static_cast<Eigen::Index>(sys.block_offset(g, c));
      for (int k = 1; k <= sys.resolution().k_max; ++k) {
        d(off + 2 * k - 1) = d(off + 2 * k) = p.generator_masses()[g] * scale * k * k;
      }
    }
  }
  const Eigen::MatrixXd& b = sys.basis();
  Eigen::MatrixXd h = b.transpose() * d.asDiagonal() * b;
  h.diagonal().array() += 1e-10 * std::max(d.maxCoeff(), 1.0);
  return Eigen::LLT<Eigen::MatrixXd>(h);
}

Eigen::VectorXd lbfgs_direction(const Eigen::VectorXd& g, const std::deque<Eigen::VectorXd>& s,
                                const std::deque<Eigen::VectorXd>& yv, const Eigen::LLT<Eigen::MatrixXd>& h0) {
  Eigen::VectorXd q = g;
  const std::size_t m = s.size();
  std::vector<double> alpha(m), rho(m);
  for (std::size_t i = m; i-- > 0;) {
    rho[i] = 1.0 / yv[i].dot(s[i]);
    alpha[i] = rho[i] * s[i].dot(q);
    q -= alpha[i] * yv[i];
  }
  q = h0.solve(q);
  for (std::size_t i = 0; i < m; ++i) {
    const double beta = rho[i] * yv[i].dot(q);
    q += (alpha[i] - beta) * s[i];
  }
  return -q;
}

}  // namespace

constexpr double kNoiseBand = 1e-13;

StageResult minimize_fixed_delta(const ActionProblem& p, const Eigen::VectorXd& x0, double delta,
                                 const OptimizerParams& params, double tolerance, const ProgressFn& progress,
                                 int stage_index) {
  params.validate();
  if (!(delta >= 0.0)) throw DomainError("minimize_fixed_delta: delta must be non-negative");
  const RegularizationParams reg{delta};
  const auto& sys = p.constraints();
  const double scale = 1.0 / std::sqrt(static_cast<double>(std::max(sys.free_size(), 1)));

  StageResult out;
  StageReport& rep = out.report;
  rep.delta = delta;

  Eigen::VectorXd y = sys.reduce(x0);
  Evaluation cur = evaluate_reduced(p, y, reg);
  rep.evaluations = 1;
  if (!cur.ok) {
    // Only an unregularized start can hit this; the caller decides what to do.
    throw CollisionError(-1, -1, "starting point collides or is not finite at delta=" + std::to_string(delta));
  }
  rep.action_start = cur.report.action;
  out.accepted_actions.push_back(cur.report.action);

  auto emit = [&](int iter) {
    if (progress) {
      progress({stage_index, delta, iter, cur.report.action, cur.grad_y.norm() * scale, cur.report.min_separation});
    }
  };

  const auto h0 = kinetic_preconditioner(p);
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  int iter = 0;
  for (; iter < params.max_iterations; ++iter) {
    const double gnorm = cur.grad_y.norm() * scale;
    if (gnorm < tolerance) {
      rep.converged = true;
      break;
    }
    if (params.progress_every > 0 && iter % params.progress_every == 0) emit(iter);

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Eigen::VectorXd dir = lbfgs_direction(cur.grad_y, s_hist, y_hist, h0);
      double slope = cur.grad_y.dot(dir);
      if (!(slope < 0.0)) {
        dir = -h0.solve(cur.grad_y);
        slope = cur.grad_y.dot(dir);
      }
      double step = 1.0;
      for (int bt = 0; bt < params.max_backtracks; ++bt, step *= params.contraction) {
        const Eigen::VectorXd y_new = y + step * dir;
        Evaluation trial = evaluate_reduced(p, y_new, reg);
        ++rep.evaluations;
        if (!trial.ok) continue;
        const bool armijo = trial.report.action <= cur.report.action + params.armijo_c1 * step * slope &&
                            trial.report.action < cur.report.action;
        // Second attempt only: near a stiff minimum the decrease sits below rounding, so fall back to
        // the gradient norm as long as the action stays inside the noise band.
        const bool noisy = attempt == 1 &&
                           trial.report.action <= cur.report.action + kNoiseBand * std::abs(cur.report.action) &&
                           trial.grad_y.norm() < cur.grad_y.norm();
        if (armijo || noisy) {
          const Eigen::VectorXd s = y_new - y;
          const Eigen::VectorXd dg = trial.grad_y - cur.grad_y;
          if (s.dot(dg) > 1e-12 * s.norm() * dg.norm()) {
            s_hist.push_back(s);
            y_hist.push_back(dg);
            if (static_cast<int>(s_hist.size()) > params.memory) {
              s_hist.pop_front();
              y_hist.pop_front();
            }
          }
          y = y_new;
          cur = std::move(trial);
          out.accepted_actions.push_back(cur.report.action);
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        s_hist.clear();
        y_hist.clear();
      }
    }
    if (!accepted) {
      rep.stagnated = true;
      rep.message = "line search failed to find a sufficient decrease";
      break;
    }
  }
  if (!rep.converged && !rep.stagnated) {
    if (cur.grad_y.norm() * scale < tolerance) {
      rep.converged = true;
    } else {
      rep.message = "iteration limit reached";
    }
  }

  rep.iterations = iter;
  rep.action = cur.report.action;
  rep.gradient_norm = cur.grad_y.norm() * scale;
  rep.min_separation = cur.report.min_separation;
  out.x = sys.expand(y);
  rep.constraint_residual = sys.residual(out.x);
  emit(iter);
  return out;
}

SolveReport solve_with_continuation(const ActionProblem& p, const Eigen::VectorXd& x0,
                                    const ContinuationSchedule& schedule, const OptimizerParams& params,
                                    const ProgressFn& progress) {
  const auto start = std::chrono::steady_clock::now();
  params.validate();
  const auto ladder = schedule.ladder();

  SolveReport report;
  report.x = p.constraints().project(x0);
  auto run_stage = [&](double delta, double tol, int index) {
    try {
      StageResult r = minimize_fixed_delta(p, report.x, delta, params, tol, progress, index);
      report.x = r.x;
      report.stages.push_back(r.report);
      return true;
    } catch (const Error& e) {
      report.failed_stage = index;
      report.failure = e.what();
      return false;
    }
  };

  bool ok = true;
  for (std::size_t i = 0; i < ladder.size() && ok; ++i) {
    const bool last = i + 1 == ladder.size() && !schedule.polish;
    ok = run_stage(ladder[i], last ? params.gradient_tolerance : params.stage_tolerance, static_cast<int>(i));
  }
  if (ok && schedule.polish && !report.stages.empty() && report.stages.back().min_separation > schedule.delta_floor) {
    report.polished = run_stage(0.0, params.gradient_tolerance, static_cast<int>(ladder.size()));
    ok = report.polished;
  }

  const RegularizationParams final_reg{report.polished ? 0.0 : (report.stages.empty() ? 0.0 : report.stages.back().delta)};
  try {
    Eigen::VectorXd g;
    report.final = evaluate_action(p, report.x, final_reg, &g);
  } catch (const Error&) {
  }

  if (!ok) {
    report.outcome = "failed";
  } else {
    const auto& last = report.stages.back();
    report.converged = last.converged && last.gradient_norm < params.gradient_tolerance;
    if (!report.converged) {
      report.outcome = "not-converged";
    } else if (report.polished && last.min_separation > 10.0 * schedule.delta_floor) {
      report.outcome = "candidate-non-collision";
    } else {
      report.outcome = "near-collision";
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<FourierLoop> replicate_orbit(const std::vector<FourierLoop>& bodies, int z, double exponent) {
  if (!(exponent > 0.0)) throw DomainError("replicate_orbit: exponent must be positive");
  const double lambda = std::pow(static_cast<double>(z), -2.0 / (exponent + 2.0));
  std::vector<FourierLoop> out;
  out.reserve(bodies.size());
  for (const auto& b : bodies) out.push_back(dilate(subperiod_replicate(b, z), lambda));
  return out;
}

}  // namespace choreo
