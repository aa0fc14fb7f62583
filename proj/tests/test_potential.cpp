#include <cmath>
#include <random>

#include "choreo/error.hpp"
#include "choreo/potential.hpp"
#include "doctest.h"

using namespace choreo;

namespace {

MassSystem unit_system(int n, int dim = 2, double alpha = 1.0) {
  MassSystem s;
  s.masses.assign(static_cast<std::size_t>(n), 1.0);
  s.dim = dim;
  s.exponent = alpha;
  return s;
}

}  // namespace

TEST_CASE("pair potential values") {
  CHECK(pair_potential(1, 1, 1, 1) == doctest::Approx(1.0));
  CHECK(pair_potential(1, 1, 2, 1) == doctest::Approx(0.5));
  CHECK(pair_potential(1, 1, 2, 2) == doctest::Approx(0.25));
  CHECK_THROWS_AS(pair_potential(1, 1, 0.0, 1), DomainError);
  CHECK_THROWS_AS(pair_potential(1, 1, -1.0, 1), DomainError);
}

TEST_CASE("pair potential decreases with distance") {
  double prev = pair_potential(2, 3, 0.01, 1.5);
  for (double r = 0.02; r < 10; r *= 1.3) {
    const double v = pair_potential(2, 3, r, 1.5);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("total potential examples") {
  Configuration tri(3, 2);
  tri << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2;
  CHECK(total_potential(tri, unit_system(3)) == doctest::Approx(3.0));

  MassSystem two = unit_system(2);
  two.masses = {1, 5};
  Configuration pair(2, 2);
  pair << 0, 0, 2, 0;
  CHECK(total_potential(pair, two) == doctest::Approx(2.5));

  Configuration line(3, 2);
  line << 0, 0, 1, 0, 2, 0;
  CHECK(total_potential(line, unit_system(3)) == doctest::Approx(2.5));
}

TEST_CASE("coincident bodies report the pair") {
  Configuration q(3, 2);
  q << 0, 0, 1, 1, 1, 1;
  try {
    total_potential(q, unit_system(3));
    FAIL("expected a collision");
  } catch (const CollisionError& e) {
    CHECK(e.first() == 1);
    CHECK(e.second() == 2);
  }
  CHECK_THROWS_AS(force_field(q, unit_system(3), {0.1}), CollisionError);
}

TEST_CASE("force field matches central differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = trial % 2 ? 3 : 2;
    MassSystem sys = unit_system(4, dim, trial % 3 == 0 ? 2.0 : 1.0);
    for (auto& m : sys.masses) m = 0.5 + std::abs(u(rng));
    Configuration q(4, dim);
    do {
      for (int i = 0; i < q.size(); ++i) q.data()[i] = u(rng);
    } while (min_pair_separation(q) < 0.2);
    const RegularizationParams reg{trial % 4 == 0 ? 0.5 : 0.0};
    const Configuration g = force_field(q, sys, reg);
    const double h = 1e-6;
    for (int i = 0; i < q.rows(); ++i) {
      for (int c = 0; c < dim; ++c) {
        Configuration qp = q, qm = q;
        qp(i, c) += h;
        qm(i, c) -= h;
        const double fd = (total_potential(qp, sys, reg) - total_potential(qm, sys, reg)) / (2 * h);
        CHECK(std::abs(fd - g(i, c)) <= 1e-6 * std::max(1.0, g.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("two unit masses: tight finite-difference check") {
  Configuration q(2, 2);
  q << 0, 0, 1, 0;
  const MassSystem sys = unit_system(2);
  const Configuration g = force_field(q, sys);
  const double h = 1e-6;
  Configuration qp = q, qm = q;
  qp(1, 0) += h;
  qm(1, 0) -= h;
  const double fd = (total_potential(qp, sys) - total_potential(qm, sys)) / (2 * h);
  CHECK(std::abs(fd - g(1, 0)) / std::abs(g(1, 0)) < 1e-8);
  // Attractive convention: the gradient of U on body 2 points back to body 1.
  CHECK(g(1, 0) < 0);
}

TEST_CASE("forces sum to zero and N = 1 has none") {
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  Configuration q(5, 3);
  for (int i = 0; i < q.size(); ++i) q.data()[i] = nd(rng);
  const Configuration g = force_field(q, unit_system(5, 3), {0.3});
  CHECK(g.colwise().sum().cwiseAbs().maxCoeff() < 1e-12);

  Configuration one(1, 2);
  one << 0.3, 0.4;
  CHECK(force_field(one, unit_system(1)).isZero());
}

TEST_CASE("translation invariance") {
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  Configuration q(4, 2);
  for (int i = 0; i < q.size(); ++i) q.data()[i] = nd(rng);
  Configuration moved = q;
  moved.col(0).array() += 3.7;
  moved.col(1).array() -= 1.2;
  const MassSystem sys = unit_system(4);
  CHECK(std::abs(total_potential(q, sys) - total_potential(moved, sys)) < 1e-12);
}

TEST_CASE("regularized pair potential") {
  const RegularizationParams reg{0.1};
  CHECK(regularized_pair_potential(1, 1, 0.5, 1, reg) == pair_potential(1, 1, 0.5, 1));
  CHECK(regularized_pair_potential(1, 1, 0.04, 1, reg) == doctest::Approx(650.0));
  for (double r = 0.001; r < 2.0; r *= 1.1) {
    CHECK(regularized_pair_potential(1, 1, r, 1, {0.0}) == pair_potential(1, 1, r, 1));
    const double reg_v = regularized_pair_potential(2, 3, r, 1, reg);
    const double base = pair_potential(2, 3, r, 1);
    CHECK(reg_v >= base);
    if (r >= reg.delta) CHECK(reg_v == base);
    if (r < reg.delta) CHECK(reg_v > base);
    if (r <= reg.delta / 2) CHECK(reg_v - base == doctest::Approx(1.0 / (r * r)).epsilon(1e-12));
  }
}

TEST_CASE("regularized slope matches finite differences") {
  const RegularizationParams reg{0.4};
  for (double r = 0.05; r < 0.6; r += 0.013) {
    const double h = 1e-7;
    const double fd = (regularized_pair_potential(1.5, 1, r + h, 1, reg) -
                       regularized_pair_potential(1.5, 1, r - h, 1, reg)) / (2 * h);
    CHECK(regularized_pair_slope(1.5, 1, r, 1, reg) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("taper is monotone between delta/2 and delta") {
  const double delta = 0.2;
  double prev = 1.0;
  for (double r = 0.1; r <= 0.2; r += 0.001) {
    const double phi = barrier_taper(r, delta);
    CHECK(phi <= prev + 1e-15);
    CHECK(phi >= 0.0);
    prev = phi;
  }
  CHECK(barrier_taper(0.05, delta) == 1.0);
  CHECK(barrier_taper(0.25, delta) == 0.0);
}

TEST_CASE("strong force condition") {
  CHECK_FALSE(satisfies_strong_force(1.0));
  CHECK(satisfies_strong_force(2.0));
  CHECK(satisfies_strong_force(3.0));
}

TEST_CASE("mass system validation names fields") {
  MassSystem s = unit_system(3);
  s.masses[1] = -1.0;
  try {
    s.validate();
    FAIL("expected validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "masses");
  }
  s = unit_system(3);
  s.dim = 4;
  CHECK_THROWS_AS(s.validate(), ValidationError);
  s = unit_system(3);
  s.period = 0;
  CHECK_THROWS_AS(s.validate(), ValidationError);
}
