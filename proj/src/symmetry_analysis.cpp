#include "choreo/symmetry_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "choreo/error.hpp"

namespace choreo {

std::vector<ScheduledCollision> even_collision_schedule(int n) {
  std::vector<ScheduledCollision> out;
  if (n <= 0 || n % 2 != 0) return out;
  const int k = n / 2;
  for (int i = 1; i <= k; ++i) out.push_back({i, i + k, Rational(i, n)});
  return out;
}

bool dense_set_contains(Rational t) {
  if (t < Rational(0) || Rational(1) < t) throw DomainError("dense_set_contains: t must lie in [0, T]");
  if (t.num() == 0) return true;
  return t.num() % 2 != 0 && t.den() % 2 == 0;
}

bool coprime_phase_check(int k, int n1) {
  if (k < 1 || n1 < 1) throw DomainError("coprime_phase_check: arguments must be positive");
  return std::gcd(k, n1) == 1;
}

// Every Klein eight sits at the origin at t = 0 and t = T/2, so two bodies whose
// shifts differ by a multiple of T/2 meet there, even on different generators.
bool has_shift_collision(const ConstraintSpec& spec) {
  const auto bodies = body_layout(spec);
  for (std::size_t a = 0; a < bodies.size(); ++a) {
    for (std::size_t b = a + 1; b < bodies.size(); ++b) {
      const Rational twice = (Rational(2) * (bodies[a].shift - bodies[b].shift)).wrapped();
      if (twice.num() == 0) return true;
    }
  }
  return false;
}

ArrangementPlan plan_arrangement(int n) {
  if (n < 3) throw DomainError("plan_arrangement: need at least 3 bodies");
  ArrangementPlan plan;
  if (n % 2 != 0) {
    plan.spec = ConstraintSpec::arrangement({{n, Rational(0)}});
    return plan;
  }

  struct Candidate {
    int n1, n2, k;
  };
  std::vector<Candidate> found;
  for (int n1 = 1; n1 < n; n1 += 2) {
    const int n2 = n - n1;
    for (int k = 4; k <= 8 * n + 8; ++k) {
      if (!coprime_phase_check(k, n1)) continue;
      const auto spec = ConstraintSpec::arrangement({{n1, Rational(0)}, {n2, Rational(1, k)}});
      if (!has_shift_collision(spec)) {
        found.push_back({n1, n2, k});
        break;
      }
    }
  }
  if (found.empty()) throw DomainError("plan_arrangement: no collision-free split found");

  const auto better = [](const Candidate& a, const Candidate& b) {
    const int ma = std::min(a.n1, a.n2), mb = std::min(b.n1, b.n2);
    if (ma != mb) return ma > mb;
    if (a.k != b.k) return a.k < b.k;
    return a.n1 > b.n1;
  };
  const Candidate best = *std::min_element(found.begin(), found.end(), better);
  plan.spec = ConstraintSpec::arrangement({{best.n1, Rational(0)}, {best.n2, Rational(1, best.k)}});
  plan.k = best.k;
  if (std::min(best.n1, best.n2) < 3) {
    plan.warnings.push_back("split " + std::to_string(best.n1) + "+" + std::to_string(best.n2) +
                            " uses a group with fewer than 3 bodies; the coupled zero-sum relation then "
                            "forces the generator to vanish");
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Self-intersection audit

namespace {

using Vec2 = Eigen::Vector2d;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

int circular_gap(int a, int b, int n) {
  const int d = std::abs(a - b) % n;
  return std::min(d, n - d);
}

Vec2 planar(const Eigen::VectorXd& v) { return {v(0), v(1)}; }

double wrap_time(double t, double period) {
  double r = std::fmod(t, period);
  if (r < 0) r += period;
  if (period - r < 1e-12 * period) r = 0.0;
  return r;
}

}  // namespace

SelfIntersectionAudit simple_eight_self_intersections(const FourierLoop& loop, double tol, int samples) {
  if (loop.dim() < 2) throw DimensionError("self-intersection audit needs a planar loop");
  const int n = std::max(samples, 16);
  const double period = loop.period();
  std::vector<Vec2> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts[i] = planar(evaluate(loop, period * i / n));

  std::vector<std::pair<int, int>> hits;
  for (int i = 0; i < n; ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % n];
    const Vec2 lo = a.cwiseMin(b).array() - tol, hi = a.cwiseMax(b).array() + tol;
    for (int j = i + 2; j < n; ++j) {
      if (circular_gap(i, j, n) < 2) continue;
      const Vec2& c = pts[j];
      const Vec2& d = pts[(j + 1) % n];
      if (std::max(c.x(), d.x()) < lo.x() || std::min(c.x(), d.x()) > hi.x() ||
          std::max(c.y(), d.y()) < lo.y() || std::min(c.y(), d.y()) > hi.y()) {
        continue;
      }
      if (segment_distance(a, b, c, d) < tol) hits.emplace_back(i, j);
    }
  }

  // Cluster hits that are neighbours in (unordered, circular) index space.
  std::vector<int> parent(hits.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto near = [n](std::pair<int, int> p, std::pair<int, int> q) {
    return (circular_gap(p.first, q.first, n) <= 2 && circular_gap(p.second, q.second, n) <= 2) ||
           (circular_gap(p.first, q.second, n) <= 2 && circular_gap(p.second, q.first, n) <= 2);
  };
  for (std::size_t a = 0; a < hits.size(); ++a) {
    for (std::size_t b = a + 1; b < hits.size(); ++b) {
      if (near(hits[a], hits[b])) parent[find(static_cast<int>(a))] = find(static_cast<int>(b));
    }
  }

  SelfIntersectionAudit audit;
  constexpr std::size_t kDegenerateCluster = 32;
  const double h = period / n;
  for (std::size_t root = 0; root < hits.size(); ++root) {
    if (find(static_cast<int>(root)) != static_cast<int>(root)) continue;
    std::vector<std::pair<int, int>> members;
    for (std::size_t a = 0; a < hits.size(); ++a) {
      if (find(static_cast<int>(a)) == static_cast<int>(root)) members.push_back(hits[a]);
    }
    if (members.size() > kDegenerateCluster) {
      audit.degenerate = true;
      continue;
    }
    double t1 = (members.front().first + 0.5) * h;
    double t2 = (members.front().second + 0.5) * h;
    auto gap = [&] { return (planar(evaluate(loop, t1)) - planar(evaluate(loop, t2))).norm(); };
    for (int it = 0; it < 50 && gap() > 1e-14; ++it) {
      Eigen::Matrix2d jac;
      jac.col(0) = planar(velocity(loop, t1));
      jac.col(1) = -planar(velocity(loop, t2));
      if (std::abs(jac.determinant()) < 1e-14 * (1.0 + jac.squaredNorm())) break;
      const Vec2 step = jac.partialPivLu().solve(planar(evaluate(loop, t1)) - planar(evaluate(loop, t2)));
      t1 -= step(0);
      t2 -= step(1);
    }
    const bool ok = gap() < std::max(tol, 1e-10);
    t1 = wrap_time(t1, period);
    t2 = wrap_time(t2, period);
    if (!ok || circular_gap(static_cast<int>(std::lround(t1 / h)), static_cast<int>(std::lround(t2 / h)), n) < 2) {
      audit.degenerate = true;
      continue;
    }
    if (t1 > t2) std::swap(t1, t2);
    const bool duplicate = std::any_of(audit.crossings.begin(), audit.crossings.end(), [&](const auto& c) {
      return std::abs(c.first - t1) < 1e-7 * period && std::abs(c.second - t2) < 1e-7 * period;
    });
    if (!duplicate) audit.crossings.emplace_back(t1, t2);
  }
  std::sort(audit.crossings.begin(), audit.crossings.end());
  return audit;
}

bool is_simple_eight(const SelfIntersectionAudit& audit, double period, double param_tol) {
  if (audit.degenerate || audit.crossings.size() != 1) return false;
  const auto [t1, t2] = audit.crossings.front();
  auto circ = [period](double a, double b) {
    const double d = std::fmod(std::abs(a - b), period);
    return std::min(d, period - d) / period;
  };
  return circ(t1, 0.0) < param_tol && circ(t2, 0.5 * period) < param_tol;
}

}  // namespace choreo
