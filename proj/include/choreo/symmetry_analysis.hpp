#pragma once

#include <string>
#include <utility>
#include <vector>

#include "choreo/looppath.hpp"
#include "choreo/rational.hpp"
#include "choreo/symmetry.hpp"

namespace choreo {

/// Bodies `first` and `second` (1-based) meet at the origin at `time` (fraction of T).
struct ScheduledCollision {
  int first;
  int second;
  Rational time;

  friend bool operator==(const ScheduledCollision&, const ScheduledCollision&) = default;
};

/// Forced origin collisions of an even equivariant Klein choreography:
/// (i, i + N/2) at t = iT/N for i = 1..N/2. Empty for odd N.
std::vector<ScheduledCollision> even_collision_schedule(int n);

/// Membership of t = p/q (in [0, 1], fractions of T) in {0} U {(2r1-1)/(2r2)}.
/// Throws DomainError outside [0, 1].
bool dense_set_contains(Rational t);

bool coprime_phase_check(int k, int n1);

struct ArrangementPlan {
  ConstraintSpec spec;
  int k = 0;  // alpha_2 = T/k; 0 for a single group
  std::vector<std::string> warnings;
};

/// Places N >= 3 equal bodies on one eight: one group for odd N, two odd
/// groups with phase T/K otherwise. Throws DomainError for N < 3.
ArrangementPlan plan_arrangement(int n);

/// True when two bodies of `spec` have shifts differing by a multiple of T/2.
bool has_shift_collision(const ConstraintSpec& spec);

struct SelfIntersectionAudit {
  /// Refined parameter pairs (t1 < t2), both in [0, T).
  std::vector<std::pair<double, double>> crossings;
  /// Set when the curve overlaps itself along an arc (e.g. a doubly traversed loop).
  bool degenerate = false;
};

/// Self-intersections of the planar projection (first two coordinates) of a loop.
SelfIntersectionAudit simple_eight_self_intersections(const FourierLoop& loop, double tol = 1e-9,
                                                      int samples = 2048);

/// Exactly one crossing, located at {0, T/2} within `param_tol` (fraction of T).
bool is_simple_eight(const SelfIntersectionAudit& audit, double period, double param_tol = 1e-6);

}  // namespace choreo
