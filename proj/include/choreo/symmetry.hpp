#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "choreo/looppath.hpp"
#include "choreo/rational.hpp"

namespace choreo {

// ---------------------------------------------------------------------------
// Group elements acting on loops

/// t -> t + offset*T (shift) or t -> -t + offset*T (reflection).
struct TimeMap {
  enum class Kind { Shift, Reflection };
  Kind kind = Kind::Shift;
  Rational offset;

  double apply(double t, double period) const;
};

/// x -> D P x, where D = diag(signs) and P optionally swaps the first two coordinates.
struct SpaceMap {
  std::vector<int> signs;
  bool swap_xy = false;

  int dim() const noexcept { return static_cast<int>(signs.size()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& x) const;
  int determinant() const;
};

struct SymmetryElement {
  TimeMap time;
  SpaceMap space;
};

/// Klein-group generators acting on the first two coordinates; further
/// coordinates are left untouched.
SymmetryElement klein_sigma(int dim);
SymmetryElement klein_tau(int dim);
SymmetryElement klein_sigma_tau(int dim);

/// Loop t -> g_space^{-1}(q(g_time(t))). A loop is g-symmetric iff this
/// returns it unchanged. Throws DimensionError on mismatch.
FourierLoop apply_element(const SymmetryElement& g, const FourierLoop& loop);

// ---------------------------------------------------------------------------
// Constraint catalog

enum class Family {
  FigureEight,
  DoubleEightPerpendicular,
  DoubleEightParallel,
  Mixed1,
  Mixed2,
  Mixed3,
  AdHoc4,
  AdHoc5,
  AdHoc6,
  Arrangement,
};

std::string family_name(Family f);
/// Inverse of family_name; throws ValidationError naming "spec.family".
Family family_from_name(std::string_view name);

enum class ZeroSumMode { PerGroup, Coupled };

/// A group of bodies sharing one generator with equal time shifts size/T and
/// an extra phase difference (fraction of T).
struct GroupSpec {
  int size = 3;
  Rational phase;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

struct ConstraintSpec {
  Family family = Family::FigureEight;
  std::vector<GroupSpec> groups;
  ZeroSumMode zero_sum = ZeroSumMode::PerGroup;

  static ConstraintSpec figure_eight(int n, Rational phase = {});
  static ConstraintSpec double_eight(int n1, int n2, Rational alpha1, Rational alpha2, bool perpendicular);
  /// symmetry 1 or 2: one group; symmetry 3: two groups on one planar eight.
  static ConstraintSpec mixed(int symmetry, std::vector<GroupSpec> groups);
  static ConstraintSpec adhoc(int symmetry, int n, Rational phase = {});
  static ConstraintSpec arrangement(std::vector<GroupSpec> groups);

  int dim() const;
  int generator_count() const;
  int body_count() const;
  /// lcm of 4, all group sizes and all phase denominators.
  std::int64_t lattice_modulus() const;
  /// Throws ValidationError on structural problems (wrong group count, ...).
  void validate() const;
  /// Non-fatal observations: non-coprime phase, even groups, tiny groups.
  std::vector<std::string> warnings() const;

  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

struct Resolution {
  int k_max = 32;
  int m_samples = 264;
};

/// K harmonics and the smallest multiple of the lattice modulus >= max(256, 2K+2).
Resolution default_resolution(const ConstraintSpec& spec, int k_max = 32);

// ---------------------------------------------------------------------------
// Compiled linear constraints

enum class KleinOrientation { None, Standard, Swapped };

/// Relation imposed on the third coordinate of a generator.
enum class VerticalRule { None, AntiHalfPeriod, Symmetry2, Symmetry4, Symmetry5, Symmetry6 };

struct GeneratorRule {
  KleinOrientation klein = KleinOrientation::Standard;
  VerticalRule vertical = VerticalRule::None;
};

/// How one body is read off a generator: q_b(t) = diag(signs) q_g(t + shift T).
struct BodyRef {
  int generator = 0;
  int group = 0;
  int index_in_group = 1;
  Rational shift;
  std::vector<int> signs;
};

std::vector<GeneratorRule> generator_rules(const ConstraintSpec& spec);
std::vector<BodyRef> body_layout(const ConstraintSpec& spec);

/// One homogeneous relation sum_k weight_k * q_{g_k, c_k}(t_{j_k}) = 0 on the grid.
struct SampleTerm {
  int generator;
  int coord;
  int index;
  double weight;
};

enum class RelationKind { Klein, ZeroSum, Vertical };

struct Relation {
  RelationKind kind;
  std::vector<SampleTerm> terms;
};

/// Relations of a spec on the stacked coefficient vector of its generators and
/// the orthogonal projector onto their common null space.
///
/// Coefficient layout: generator-major, then coordinate, then the 2K+1
/// Fourier coefficients of FourierLoop.
class LinearConstraintSystem {
 public:
  LinearConstraintSystem(ConstraintSpec spec, Resolution res, std::vector<Relation> relations);

  const ConstraintSpec& spec() const noexcept { return spec_; }
  const Resolution& resolution() const noexcept { return res_; }
  int dim() const noexcept { return dim_; }
  int generator_count() const noexcept { return generators_; }
  int coeffs_per_coord() const noexcept { return 2 * res_.k_max + 1; }
  int full_size() const noexcept { return generators_ * dim_ * coeffs_per_coord(); }
  int free_size() const noexcept { return static_cast<int>(basis_.cols()); }
  std::size_t block_offset(int generator, int coord) const;

  const std::vector<Relation>& relations() const noexcept { return relations_; }
  const std::vector<BodyRef>& bodies() const noexcept { return bodies_; }
  const Eigen::MatrixXd& synthesis() const noexcept { return synthesis_; }

  /// Orthonormal basis B (full_size x free_size) of the feasible subspace.
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }
  /// P = B B^T.
  Eigen::MatrixXd projector() const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  Eigen::VectorXd reduce(const Eigen::VectorXd& x) const { return basis_.transpose() * x; }
  Eigen::VectorXd expand(const Eigen::VectorXd& y) const { return basis_ * y; }

  /// Generator samples on the grid: entry [g] is M x dim.
  std::vector<Eigen::MatrixXd> generator_samples(const Eigen::VectorXd& x) const;
  /// Max-norm violation of all relations on the grid.
  double residual(const Eigen::VectorXd& x) const;
  /// Grid offset of a body: shift * M (exact by the lattice condition).
  int shift_index(const BodyRef& body) const;

 private:
  ConstraintSpec spec_;
  Resolution res_;
  int dim_;
  int generators_;
  std::vector<Relation> relations_;
  std::vector<BodyRef> bodies_;
  Eigen::MatrixXd synthesis_;
  Eigen::MatrixXd basis_;
};

enum class RelationFilter { All, ZeroSumOnly };

/// Throws ModulusError when M is not a multiple of the lattice modulus and
/// AliasingError when M < 2K + 2.
LinearConstraintSystem compile(const ConstraintSpec& spec, Resolution res,
                               RelationFilter filter = RelationFilter::All);

Eigen::VectorXd pack_generators(const std::vector<FourierLoop>& generators,
                                const LinearConstraintSystem& system);
std::vector<FourierLoop> unpack_generators(const Eigen::VectorXd& x,
                                           const LinearConstraintSystem& system, double period);

/// Relation violation of explicit generator loops.
double residual(const LinearConstraintSystem& system, const std::vector<FourierLoop>& generators);

/// All body loops, group by group; body i of group g is its generator shifted
/// by (N_g - i) T / N_g + alpha_g. Throws ArityError on a generator-count mismatch.
std::vector<FourierLoop> body_trajectories(const ConstraintSpec& spec,
                                           const std::vector<FourierLoop>& generators);

}  // namespace choreo
