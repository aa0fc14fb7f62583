#include <cmath>
#include <numbers>
#include <random>

#include "choreo/error.hpp"
#include "choreo/symmetry.hpp"
#include "doctest.h"

using namespace choreo;

namespace {

constexpr double kT = 2.0 * std::numbers::pi;

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

std::vector<FourierLoop> random_feasible(const LinearConstraintSystem& sys, unsigned seed) {
  return unpack_generators(sys.project(random_vector(sys.full_size(), seed)), sys, kT);
}

double max_diff(const FourierLoop& a, const FourierLoop& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

FourierLoop lissajous(int dim, int k_max, double c = 0.5) {
  FourierLoop q(kT, dim, k_max);
  q.sin_coeff(0, 1) = 1.0;
  q.sin_coeff(1, 2) = c;
  return q;
}

std::vector<ConstraintSpec> catalog() {
  return {
      ConstraintSpec::figure_eight(3),
      ConstraintSpec::figure_eight(5),
      ConstraintSpec::double_eight(3, 3, Rational(0), Rational(1, 8), true),
      ConstraintSpec::double_eight(3, 3, Rational(0), Rational(1, 8), false),
      ConstraintSpec::mixed(1, {{3, Rational(0)}}),
      ConstraintSpec::mixed(2, {{3, Rational(0)}}),
      ConstraintSpec::mixed(3, {{3, Rational(0)}, {3, Rational(1, 8)}}),
      ConstraintSpec::adhoc(4, 3),
      ConstraintSpec::adhoc(5, 3),
      ConstraintSpec::adhoc(6, 3),
      ConstraintSpec::arrangement({{5, Rational(0)}, {3, Rational(1, 4)}}),
  };
}

}  // namespace

TEST_CASE("rational arithmetic and formatting") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(-1, 4).wrapped() == Rational(3, 4));
  CHECK(Rational(9, 4).wrapped() == Rational(1, 4));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational::parse(" 3/8 ") == Rational(3, 8));
  CHECK(Rational::parse("2") == Rational(2));
  CHECK_THROWS_AS(Rational::parse("1/0"), ParseError);
  CHECK_THROWS_AS(Rational::parse("x"), ParseError);
  CHECK(Rational(3, 8).str() == "3/8");
  CHECK(Rational(1, 4).as_period_fraction() == "T/4");
  CHECK(Rational(3, 8).as_period_fraction() == "3T/8");
  CHECK(Rational(0).as_period_fraction() == "0");
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(lcm_positive(4, 6) == 12);
}

TEST_CASE("time and space maps") {
  const TimeMap shift{TimeMap::Kind::Shift, Rational(1, 4)};
  CHECK(shift.apply(1.0, 4.0) == doctest::Approx(2.0));
  const TimeMap refl{TimeMap::Kind::Reflection, Rational(1, 2)};
  CHECK(refl.apply(1.0, 4.0) == doctest::Approx(1.0));
  CHECK(refl.apply(0.5, 4.0) == doctest::Approx(1.5));

  SpaceMap s{{-1, 1, 1}, true};
  const Eigen::Vector3d x(1, 2, 3);
  CHECK((s.apply_inverse(s.apply(x)) - x).norm() < 1e-15);
  CHECK(s.apply(x).isApprox(Eigen::Vector3d(-2, 1, 3)));
  CHECK(s.determinant() == 1);
  CHECK(SpaceMap{{-1, 1}, false}.determinant() == -1);
}

TEST_CASE("klein generators are involutions") {
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  FourierLoop q(kT, 3, 6);
  for (double& v : q.data()) v = nd(rng);
  for (const auto& g : {klein_sigma(3), klein_tau(3), klein_sigma_tau(3)}) {
    CHECK(max_diff(apply_element(g, apply_element(g, q)), q) < 1e-12);
  }
  CHECK(max_diff(apply_element(klein_tau(3), apply_element(klein_sigma(3), q)),
                 apply_element(klein_sigma_tau(3), q)) < 1e-12);
  CHECK_THROWS_AS(apply_element(klein_sigma(2), q), DimensionError);
}

TEST_CASE("klein average is an odd loop") {
  std::mt19937 rng(12);
  std::normal_distribution<double> nd;
  FourierLoop q(kT, 2, 8);
  for (double& v : q.data()) v = nd(rng);
  FourierLoop avg = q;
  const FourierLoop a = apply_element(klein_sigma(2), q);
  const FourierLoop b = apply_element(klein_tau(2), q);
  const FourierLoop c = apply_element(klein_sigma_tau(2), q);
  for (std::size_t i = 0; i < q.data().size(); ++i)
    avg.data()[i] = 0.25 * (q.data()[i] + a.data()[i] + b.data()[i] + c.data()[i]);
  const int m = 64;
  for (int j = 0; j < m; ++j) {
    const double t = kT * j / m;
    CHECK((evaluate(avg, -t) + evaluate(avg, t)).norm() < 1e-10);
  }
  for (const auto& g : {klein_sigma(2), klein_tau(2)}) CHECK(max_diff(apply_element(g, avg), avg) < 1e-12);
}

TEST_CASE("family names round trip") {
  for (const auto& spec : catalog()) CHECK(family_from_name(family_name(spec.family)) == spec.family);
  CHECK(family_name(Family::FigureEight) == "figure-eight");
  try {
    family_from_name("nine");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "spec.family");
  }
  CHECK_THROWS_AS(ConstraintSpec::mixed(4, {{3, Rational(0)}}), ValidationError);
  CHECK_THROWS_AS(ConstraintSpec::adhoc(3, 3), ValidationError);
}

TEST_CASE("spec structure") {
  const auto de = ConstraintSpec::double_eight(3, 5, Rational(0), Rational(1, 8), true);
  CHECK(de.dim() == 2);
  CHECK(de.generator_count() == 2);
  CHECK(de.body_count() == 8);
  CHECK(de.lattice_modulus() == 120);
  CHECK(ConstraintSpec::mixed(1, {{3, Rational(0)}}).dim() == 3);
  CHECK(ConstraintSpec::figure_eight(3).lattice_modulus() == 12);

  CHECK(default_resolution(ConstraintSpec::figure_eight(3)).m_samples == 264);
  CHECK(default_resolution(ConstraintSpec::figure_eight(5)).m_samples == 260);
  CHECK(default_resolution(ConstraintSpec::arrangement({{5, Rational(0)}, {3, Rational(1, 4)}})).m_samples == 300);
  const Resolution big = default_resolution(ConstraintSpec::figure_eight(3), 200);
  CHECK(big.m_samples % 12 == 0);
  CHECK(big.m_samples >= 402);
  CHECK(big.m_samples - 12 < 402);

  for (const auto& spec : catalog()) CHECK_NOTHROW(spec.validate());
  ConstraintSpec broken = ConstraintSpec::double_eight(3, 3, Rational(0), Rational(1, 8), true);
  broken.groups.pop_back();
  CHECK_THROWS_AS(broken.validate(), ValidationError);
  broken = ConstraintSpec::figure_eight(0);
  CHECK_THROWS_AS(broken.validate(), ValidationError);
}

TEST_CASE("warnings") {
  auto has = [](const std::vector<std::string>& w, const std::string& needle) {
    for (const auto& s : w)
      if (s.find(needle) != std::string::npos) return true;
    return false;
  };
  CHECK(ConstraintSpec::figure_eight(3).warnings().empty());
  CHECK(has(ConstraintSpec::double_eight(3, 3, Rational(0), Rational(1, 6), true).warnings(), "not prime"));
  CHECK_FALSE(has(ConstraintSpec::double_eight(3, 3, Rational(0), Rational(1, 8), true).warnings(), "not prime"));
  CHECK(has(ConstraintSpec::figure_eight(4).warnings(), "even"));
  CHECK_FALSE(ConstraintSpec::arrangement({{3, Rational(0)}, {1, Rational(1, 4)}}).warnings().empty());
}

TEST_CASE("body layout") {
  const auto bodies = body_layout(ConstraintSpec::figure_eight(3));
  REQUIRE(bodies.size() == 3);
  CHECK(bodies[0].shift == Rational(2, 3));
  CHECK(bodies[2].shift == Rational(0));
  const auto de = body_layout(ConstraintSpec::double_eight(3, 3, Rational(0), Rational(1, 8), true));
  REQUIRE(de.size() == 6);
  CHECK(de[3].generator == 1);
  CHECK(de[3].shift == Rational(2, 3) + Rational(1, 8));
  CHECK(de[5].shift == Rational(1, 8));
  const auto m3 = body_layout(ConstraintSpec::mixed(3, {{3, Rational(0)}, {3, Rational(1, 8)}}));
  CHECK(m3[0].signs == std::vector<int>{1, 1, 1});
  CHECK(m3[4].signs == std::vector<int>{1, 1, -1});
  CHECK(m3[4].generator == 0);
}

TEST_CASE("compile rejects incompatible resolutions") {
  const auto fe = ConstraintSpec::figure_eight(3);
  try {
    compile(fe, {32, 266});
    FAIL("expected ModulusError");
  } catch (const ModulusError& e) {
    CHECK(e.modulus() == 12);
  }
  CHECK_THROWS_AS(compile(fe, {32, 60}), AliasingError);
  CHECK_NOTHROW(compile(fe, {8, 24}));
}

TEST_CASE("projector algebra for every family") {
  for (const auto& spec : catalog()) {
    CAPTURE(family_name(spec.family));
    const auto sys = compile(spec, default_resolution(spec));
    const Eigen::MatrixXd p = sys.projector();
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXd gram = sys.basis().transpose() * sys.basis();
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::VectorXd x = random_vector(sys.full_size(), 21);
    const Eigen::VectorXd px = sys.project(x);
    CHECK(sys.residual(px) < 1e-12);
    CHECK(sys.residual(x) > 1e-3);
    CHECK(sys.residual(px) <= sys.residual(x));
    CHECK((sys.expand(sys.reduce(px)) - px).norm() < 1e-12);
  }
}

TEST_CASE("free dimensions match harmonic counting") {
  // Planar Klein eight: x carries sin of odd k, y sin of even k; the zero sum
  // over n equally shifted bodies removes harmonics divisible by n.
  auto planar_count = [](int n, int k_max) {
    int c = 0;
    for (int k = 1; k <= k_max; ++k)
      if (k % n != 0) ++c;
    return c;
  };
  for (int n : {3, 5, 7}) {
    const auto spec = ConstraintSpec::figure_eight(n);
    CHECK(compile(spec, default_resolution(spec)).free_size() == planar_count(n, 32));
  }
  // Anti-half-period z keeps cos and sin of odd harmonics not divisible by 3.
  int odd = 0;
  for (int k = 1; k <= 32; k += 2)
    if (k % 3 != 0) ++odd;
  const auto m1 = ConstraintSpec::mixed(1, {{3, Rational(0)}});
  CHECK(compile(m1, default_resolution(m1)).free_size() == planar_count(3, 32) + 2 * odd);
}

TEST_CASE("figure-eight projector fixes the Lissajous curve") {
  const auto spec = ConstraintSpec::figure_eight(3);
  const auto sys = compile(spec, default_resolution(spec));
  for (double c : {0.5, 1.0, 2.0}) {
    const Eigen::VectorXd x = pack_generators({lissajous(2, 32, c)}, sys);
    CHECK(sys.residual(x) < 1e-12);
    CHECK((sys.project(x) - x).cwiseAbs().maxCoeff() < 1e-12);
  }
  FourierLoop bad = lissajous(2, 32);
  bad.cos_coeff(0, 1) = 0.3;
  CHECK(residual(sys, {bad}) > 0.1);
}

TEST_CASE("pack and unpack round trip") {
  const auto spec = ConstraintSpec::double_eight(3, 3, Rational(0), Rational(1, 8), true);
  const auto sys = compile(spec, default_resolution(spec));
  const Eigen::VectorXd x = random_vector(sys.full_size(), 3);
  const auto loops = unpack_generators(x, sys, kT);
  REQUIRE(loops.size() == 2);
  CHECK(loops[1].period() == kT);
  CHECK(pack_generators(loops, sys) == x);
  CHECK(sys.block_offset(1, 0) == static_cast<std::size_t>(2 * 65));
}

TEST_CASE("klein group closure and origin passages") {
  for (const auto& spec : catalog()) {
    CAPTURE(family_name(spec.family));
    const auto sys = compile(spec, default_resolution(spec));
    const auto loops = random_feasible(sys, 5);
    const auto rules = generator_rules(spec);
    for (std::size_t g = 0; g < loops.size(); ++g) {
      const FourierLoop& q = loops[g];
      const int dim = q.dim();
      SymmetryElement sigma = klein_sigma(dim), tau = klein_tau(dim), st = klein_sigma_tau(dim);
      if (rules[g].klein == KleinOrientation::Swapped) std::swap(sigma.space.signs, tau.space.signs);
      st.space.signs[0] = st.space.signs[1] = -1;
      for (const auto& e : {sigma, tau, st}) {
        // Only the planar coordinates are acted on; compare those.
        const FourierLoop img = apply_element(e, q);
        for (int j = 0; j < 64; ++j) {
          const double t = kT * j / 64;
          CHECK((evaluate(img, t) - evaluate(q, t)).head(2).norm() < 1e-10);
        }
      }
      CHECK(evaluate(q, 0.0).head(2).norm() < 1e-10);
      CHECK(evaluate(q, kT / 2).head(2).norm() < 1e-10);
    }
  }
}

TEST_CASE("symmetry 1 vertical relation") {
  const auto spec = ConstraintSpec::mixed(1, {{3, Rational(0)}});
  const auto sys = compile(spec, default_resolution(spec));
  const auto g = sys.generator_samples(sys.project(random_vector(sys.full_size(), 8)));
  const int m = sys.resolution().m_samples;
  double worst = 0.0, scale = 0.0;
  for (int j = 0; j < m; ++j) {
    worst = std::max(worst, std::abs(g[0](j, 2) + g[0]((j + m / 2) % m, 2)));
    scale = std::max(scale, std::abs(g[0](j, 2)));
  }
  CHECK(worst < 1e-12);
  CHECK(scale > 1e-3);
}

TEST_CASE("interval vertical relations of symmetries 2, 4, 5 and 6") {
  auto samples = [](const ConstraintSpec& spec, unsigned seed) {
    const auto sys = compile(spec, default_resolution(spec));
    return std::make_pair(sys.generator_samples(sys.project(random_vector(sys.full_size(), seed)))[0],
                          sys.resolution().m_samples);
  };
  auto z = [](const Eigen::MatrixXd& s, int j) { return s(((j % s.rows()) + s.rows()) % s.rows(), 2); };

  {
    const auto [s, m] = samples(ConstraintSpec::mixed(2, {{3, Rational(0)}}), 1);
    const int q = m / 4;
    for (int j = q; j <= 2 * q; ++j) CHECK(std::abs(z(s, j) - z(s, 2 * q - j)) < 1e-12);
    for (int j = 0; j < m; ++j) CHECK(std::abs(z(s, j) + z(s, j + 2 * q)) < 1e-12);
  }
  {
    const auto [s, m] = samples(ConstraintSpec::adhoc(4, 3), 2);
    const int q = m / 4;
    for (int j = 0; j < q; ++j) CHECK(std::abs(z(s, j) - z(s, j + q)) < 1e-12);
    for (int j = 2 * q; j <= 3 * q; ++j) CHECK(std::abs(z(s, j) + z(s, j + q)) < 1e-12);
    // Band-limited loops admit only z = 0 here.
    CHECK(s.col(2).cwiseAbs().maxCoeff() < 1e-12);
  }
  {
    const auto [s, m] = samples(ConstraintSpec::adhoc(5, 3), 3);
    const int q = m / 4;
    for (int j = 0; j < q; ++j) CHECK(std::abs(z(s, j) - z(s, j + q)) < 1e-12);
    for (int j = 2 * q; j <= 3 * q; ++j) CHECK(std::abs(z(s, j) - z(s, j + q)) < 1e-12);
    CHECK(s.col(2).cwiseAbs().maxCoeff() > 1e-3);
  }
  {
    const auto [s, m] = samples(ConstraintSpec::adhoc(6, 3), 4);
    const int q = m / 4;
    for (int j = 3 * q; j <= 4 * q; ++j) CHECK(std::abs(z(s, j) - z(s, j - 3 * q)) < 1e-12);
    for (int j = 2 * q; j < 3 * q; ++j) CHECK(std::abs(z(s, j) - z(s, j - q)) < 1e-12);
    CHECK(s.col(2).cwiseAbs().maxCoeff() > 1e-3);
  }
}

TEST_CASE("body trajectories") {
  const auto fe = ConstraintSpec::figure_eight(3);
  const auto sys = compile(fe, default_resolution(fe));
  const auto gen = random_feasible(sys, 9);
  const auto bodies = body_trajectories(fe, gen);
  REQUIRE(bodies.size() == 3);
  CHECK(max_diff(bodies[2], gen[0]) == 0.0);
  CHECK(max_diff(bodies[0], time_shift(gen[0], Rational(2, 3))) < 1e-12);

  for (const auto& spec : catalog()) {
    CAPTURE(family_name(spec.family));
    const auto s2 = compile(spec, default_resolution(spec));
    const auto b = body_trajectories(spec, random_feasible(s2, 10));
    CHECK(static_cast<int>(b.size()) == spec.body_count());
    if (spec.zero_sum == ZeroSumMode::PerGroup && spec.groups.size() > 1) continue;
    for (int j = 0; j < 50; ++j) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(spec.dim());
      for (const auto& q : b) sum += evaluate(q, kT * j / 50);
      CHECK(sum.norm() < 1e-12);
    }
  }

  const auto de = ConstraintSpec::double_eight(3, 3, Rational(0), Rational(1, 8), true);
  const auto sde = compile(de, default_resolution(de));
  CHECK(body_trajectories(de, random_feasible(sde, 1)).size() == 6);
  CHECK_THROWS_AS(body_trajectories(de, gen), ArityError);
}

TEST_CASE("per-group zero sums for two-generator families") {
  const auto de = ConstraintSpec::double_eight(3, 3, Rational(0), Rational(1, 8), false);
  const auto sys = compile(de, default_resolution(de));
  const auto b = body_trajectories(de, random_feasible(sys, 14));
  for (int j = 0; j < 40; ++j) {
    const double t = kT * j / 40;
    CHECK((evaluate(b[0], t) + evaluate(b[1], t) + evaluate(b[2], t)).norm() < 1e-12);
    CHECK((evaluate(b[3], t) + evaluate(b[4], t) + evaluate(b[5], t)).norm() < 1e-12);
  }
}

TEST_CASE("zero-sum-only filter") {
  const auto fe = ConstraintSpec::figure_eight(3);
  const auto full = compile(fe, default_resolution(fe));
  const auto zs = compile(fe, default_resolution(fe), RelationFilter::ZeroSumOnly);
  CHECK(zs.free_size() > full.free_size());
  for (const auto& r : zs.relations()) CHECK(r.kind == RelationKind::ZeroSum);
}
