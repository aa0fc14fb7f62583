#include "choreo/symmetry.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "choreo/error.hpp"

namespace choreo {

// ---------------------------------------------------------------------------
// Group elements

double TimeMap::apply(double t, double period) const {
  const double c = offset.value() * period;
  return kind == Kind::Shift ? t + c : -t + c;
}

Eigen::VectorXd SpaceMap::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  if (swap_xy) std::swap(y(0), y(1));
  for (int c = 0; c < dim(); ++c) y(c) *= signs[c];
  return y;
}

Eigen::VectorXd SpaceMap::apply_inverse(const Eigen::VectorXd& y) const {
  Eigen::VectorXd x = y;
  for (int c = 0; c < dim(); ++c) x(c) *= signs[c];
  if (swap_xy) std::swap(x(0), x(1));
  return x;
}

int SpaceMap::determinant() const {
  int det = swap_xy ? -1 : 1;
  for (int s : signs) det *= s;
  return det;
}

namespace {

std::vector<int> planar_signs(int dim, int sx, int sy) {
  std::vector<int> s(static_cast<std::size_t>(dim), 1);
  s[0] = sx;
  s[1] = sy;
  return s;
}

}  // namespace

SymmetryElement klein_sigma(int dim) {
  return {{TimeMap::Kind::Shift, Rational(1, 2)}, {planar_signs(dim, -1, 1), false}};
}

SymmetryElement klein_tau(int dim) {
  return {{TimeMap::Kind::Reflection, Rational(1, 2)}, {planar_signs(dim, 1, -1), false}};
}

SymmetryElement klein_sigma_tau(int dim) {
  return {{TimeMap::Kind::Reflection, Rational(0)}, {planar_signs(dim, -1, -1), false}};
}

FourierLoop apply_element(const SymmetryElement& g, const FourierLoop& loop) {
  if (g.space.dim() != loop.dim()) throw DimensionError("apply_element: space map dimension mismatch");
  FourierLoop moved = g.time.kind == TimeMap::Kind::Shift
                          ? time_shift(loop, g.time.offset)
                          : time_shift(time_reverse(loop), -g.time.offset);
  FourierLoop out = moved;
  const int width = loop.coeffs_per_coord();
  Eigen::VectorXd column(loop.dim());
  for (int i = 0; i < width; ++i) {
    for (int c = 0; c < loop.dim(); ++c) column(c) = moved.data()[static_cast<std::size_t>(c) * width + i];
    const Eigen::VectorXd mapped = g.space.apply_inverse(column);
    for (int c = 0; c < loop.dim(); ++c) out.data()[static_cast<std::size_t>(c) * width + i] = mapped(c);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Catalog

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 10> kFamilyNames{{
    {Family::FigureEight, "figure-eight"},
    {Family::DoubleEightPerpendicular, "double-eight-perpendicular"},
    {Family::DoubleEightParallel, "double-eight-parallel"},
    {Family::Mixed1, "mixed-1"},
    {Family::Mixed2, "mixed-2"},
    {Family::Mixed3, "mixed-3"},
    {Family::AdHoc4, "adhoc-4"},
    {Family::AdHoc5, "adhoc-5"},
    {Family::AdHoc6, "adhoc-6"},
    {Family::Arrangement, "arrangement"},
}};

bool is_double_eight(Family f) {
  return f == Family::DoubleEightPerpendicular || f == Family::DoubleEightParallel;
}

int required_groups(Family f) {
  switch (f) {
    case Family::DoubleEightPerpendicular:
    case Family::DoubleEightParallel:
    case Family::Mixed3: return 2;
    case Family::Arrangement: return -1;
    default: return 1;
  }
}

}  // namespace

std::string family_name(Family f) {
  for (const auto& [fam, name] : kFamilyNames) {
    if (fam == f) return std::string(name);
  }
  return "unknown";
}

Family family_from_name(std::string_view name) {
  for (const auto& [fam, n] : kFamilyNames) {
    if (n == name) return fam;
  }
  throw ValidationError("spec.family", "spec.family: unknown family '" + std::string(name) + "'");
}

ConstraintSpec ConstraintSpec::figure_eight(int n, Rational phase) {
  return {Family::FigureEight, {{n, phase}}, ZeroSumMode::PerGroup};
}

ConstraintSpec ConstraintSpec::double_eight(int n1, int n2, Rational alpha1, Rational alpha2,
                                            bool perpendicular) {
  return {perpendicular ? Family::DoubleEightPerpendicular : Family::DoubleEightParallel,
          {{n1, alpha1}, {n2, alpha2}},
          ZeroSumMode::PerGroup};
}

ConstraintSpec ConstraintSpec::mixed(int symmetry, std::vector<GroupSpec> groups) {
  Family f = Family::Mixed1;
  switch (symmetry) {
    case 1: f = Family::Mixed1; break;
    case 2: f = Family::Mixed2; break;
    case 3: f = Family::Mixed3; break;
    default: throw ValidationError("spec.family", "mixed symmetry must be 1, 2 or 3");
  }
  return {f, std::move(groups), ZeroSumMode::PerGroup};
}

ConstraintSpec ConstraintSpec::adhoc(int symmetry, int n, Rational phase) {
  Family f = Family::AdHoc4;
  switch (symmetry) {
    case 4: f = Family::AdHoc4; break;
    case 5: f = Family::AdHoc5; break;
    case 6: f = Family::AdHoc6; break;
    default: throw ValidationError("spec.family", "ad-hoc symmetry must be 4, 5 or 6");
  }
  return {f, {{n, phase}}, ZeroSumMode::PerGroup};
}

ConstraintSpec ConstraintSpec::arrangement(std::vector<GroupSpec> groups) {
  return {Family::Arrangement, std::move(groups), ZeroSumMode::Coupled};
}

int ConstraintSpec::dim() const {
  switch (family) {
    case Family::FigureEight:
    case Family::DoubleEightPerpendicular:
    case Family::DoubleEightParallel:
    case Family::Arrangement: return 2;
    default: return 3;
  }
}

int ConstraintSpec::generator_count() const { return is_double_eight(family) ? 2 : 1; }

int ConstraintSpec::body_count() const {
  int n = 0;
  for (const auto& g : groups) n += g.size;
  return n;
}

std::int64_t ConstraintSpec::lattice_modulus() const {
  std::int64_t l = 4;
  for (const auto& g : groups) {
    l = lcm_positive(l, g.size);
    l = lcm_positive(l, g.phase.den());
  }
  return l;
}

void ConstraintSpec::validate() const {
  const int need = required_groups(family);
  if (need > 0 && static_cast<int>(groups.size()) != need) {
    throw ValidationError("masses", family_name(family) + " needs exactly " + std::to_string(need) +
                                        " mass group(s), got " + std::to_string(groups.size()));
  }
  if (groups.empty()) throw ValidationError("masses", "at least one mass group is required");
  for (const auto& g : groups) {
    if (g.size < 1) throw ValidationError("masses", "group sizes must be positive");
  }
}

std::vector<std::string> ConstraintSpec::warnings() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const int n = groups[i].size;
    if (n % 2 == 0) {
      out.push_back("group " + std::to_string(i + 1) + " has an even body count " + std::to_string(n) +
                    "; equal shifts on a Klein-symmetric eight force collisions at the origin");
    }
    if (groups.size() > 1 && n < 3) {
      out.push_back("group " + std::to_string(i + 1) + " has fewer than 3 bodies");
    }
  }
  if (groups.size() >= 2) {
    const Rational diff = (groups[1].phase - groups[0].phase).wrapped();
    if (diff.num() == 1) {
      const std::int64_t k = diff.den();
      if (std::gcd<std::int64_t>(k, groups[0].size) != 1) {
        out.push_back("phase difference T/" + std::to_string(k) + " is not prime to N1 = " +
                      std::to_string(groups[0].size));
      }
    }
  }
  return out;
}

Resolution default_resolution(const ConstraintSpec& spec, int k_max) {
  const std::int64_t l = spec.lattice_modulus();
  const std::int64_t floor_m = std::max<std::int64_t>(256, 2 * k_max + 2);
  const std::int64_t m = ((floor_m + l - 1) / l) * l;
  return {k_max, static_cast<int>(m)};
}

std::vector<GeneratorRule> generator_rules(const ConstraintSpec& spec) {
  using K = KleinOrientation;
  using V = VerticalRule;
  switch (spec.family) {
    case Family::FigureEight:
    case Family::Arrangement: return {{K::Standard, V::None}};
    case Family::DoubleEightPerpendicular: return {{K::Standard, V::None}, {K::Swapped, V::None}};
    case Family::DoubleEightParallel: return {{K::Standard, V::None}, {K::Standard, V::None}};
    case Family::Mixed1: return {{K::Standard, V::AntiHalfPeriod}};
    case Family::Mixed2:
    case Family::Mixed3: return {{K::Standard, V::Symmetry2}};
    case Family::AdHoc4: return {{K::Standard, V::Symmetry4}};
    case Family::AdHoc5: return {{K::Standard, V::Symmetry5}};
    case Family::AdHoc6: return {{K::Standard, V::Symmetry6}};
  }
  return {};
}

std::vector<BodyRef> body_layout(const ConstraintSpec& spec) {
  std::vector<BodyRef> out;
  const int dim = spec.dim();
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const auto& group = spec.groups[g];
    for (int i = 1; i <= group.size; ++i) {
      BodyRef b;
      b.group = static_cast<int>(g);
      b.index_in_group = i;
      b.generator = is_double_eight(spec.family) ? static_cast<int>(g) : 0;
      b.shift = (Rational(group.size - i, group.size) + group.phase).wrapped();
      b.signs.assign(static_cast<std::size_t>(dim), 1);
      if (spec.family == Family::Mixed3 && g == 1) b.signs[2] = -1;
      out.push_back(std::move(b));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Relations

namespace {

int wrap_index(long j, int m) {
  long r = j % m;
  if (r < 0) r += m;
  return static_cast<int>(r);
}

void add_pair(std::vector<Relation>& out, RelationKind kind, int g, int c, int m, long j1, double w1,
              long j2, double w2) {
  out.push_back({kind, {{g, c, wrap_index(j1, m), w1}, {g, c, wrap_index(j2, m), w2}}});
}

void add_klein(std::vector<Relation>& out, int g, KleinOrientation orientation, int m) {
  if (orientation == KleinOrientation::None) return;
  // sigma: q(t + T/2) = S q(t);  tau: q(T/2 - t) = R q(t).
  std::array<int, 2> shift_signs{-1, 1};
  std::array<int, 2> reflect_signs{1, -1};
  if (orientation == KleinOrientation::Swapped) std::swap(shift_signs, reflect_signs);
  const int half = m / 2;
  for (int c = 0; c < 2; ++c) {
    for (int j = 0; j < m; ++j) {
      add_pair(out, RelationKind::Klein, g, c, m, j + half, 1.0, j, -shift_signs[c]);
      add_pair(out, RelationKind::Klein, g, c, m, half - j, 1.0, j, -reflect_signs[c]);
    }
  }
}

void add_vertical(std::vector<Relation>& out, int g, VerticalRule rule, int m) {
  const int q = m / 4;
  constexpr int z = 2;
  auto anti_half = [&] {
    for (int j = 0; j < m; ++j) add_pair(out, RelationKind::Vertical, g, z, m, j, 1.0, j + 2 * q, 1.0);
  };
  switch (rule) {
    case VerticalRule::None: return;
    case VerticalRule::AntiHalfPeriod: anti_half(); return;
    case VerticalRule::Symmetry2:
      // q3(t) = q3(T/2 - t) on [T/4, T/2], plus the anti-half-period relation.
      for (int j = q; j <= 2 * q; ++j) add_pair(out, RelationKind::Vertical, g, z, m, j, 1.0, 2 * q - j, -1.0);
      anti_half();
      return;
    case VerticalRule::Symmetry4:
      for (int j = 0; j < q; ++j) add_pair(out, RelationKind::Vertical, g, z, m, j, 1.0, j + q, -1.0);
      for (int j = 2 * q; j <= 3 * q; ++j) add_pair(out, RelationKind::Vertical, g, z, m, j, 1.0, j + q, 1.0);
      return;
    case VerticalRule::Symmetry5:
      for (int j = 0; j < q; ++j) add_pair(out, RelationKind::Vertical, g, z, m, j, 1.0, j + q, -1.0);
      for (int j = 2 * q; j <= 3 * q; ++j) add_pair(out, RelationKind::Vertical, g, z, m, j, 1.0, j + q, -1.0);
      return;
    case VerticalRule::Symmetry6:
      for (int j = 3 * q; j <= 4 * q; ++j) add_pair(out, RelationKind::Vertical, g, z, m, j, 1.0, j - 3 * q, -1.0);
      for (int j = 2 * q; j < 3 * q; ++j) add_pair(out, RelationKind::Vertical, g, z, m, j, 1.0, j - q, -1.0);
      return;
  }
}

int shift_to_index(const Rational& shift, int m) {
  const Rational w = shift.wrapped();
  return static_cast<int>((w.num() * m) / w.den());
}

void add_zero_sum(std::vector<Relation>& out, const std::vector<BodyRef>& bodies, int dim, int m) {
  for (int c = 0; c < dim; ++c) {
    for (int j = 0; j < m; ++j) {
      Relation r{RelationKind::ZeroSum, {}};
      for (const auto& b : bodies) {
        r.terms.push_back({b.generator, c, wrap_index(j + shift_to_index(b.shift, m), m),
                           static_cast<double>(b.signs[c])});
      }
      out.push_back(std::move(r));
    }
  }
}

std::vector<Relation> build_relations(const ConstraintSpec& spec, int m, RelationFilter filter) {
  std::vector<Relation> out;
  const auto rules = generator_rules(spec);
  if (filter == RelationFilter::All) {
    for (std::size_t g = 0; g < rules.size(); ++g) {
      add_klein(out, static_cast<int>(g), rules[g].klein, m);
      add_vertical(out, static_cast<int>(g), rules[g].vertical, m);
    }
  }
  const auto bodies = body_layout(spec);
  if (spec.zero_sum == ZeroSumMode::Coupled) {
    add_zero_sum(out, bodies, spec.dim(), m);
  } else {
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
      std::vector<BodyRef> members;
      for (const auto& b : bodies) {
        if (b.group == static_cast<int>(g)) members.push_back(b);
      }
      add_zero_sum(out, members, spec.dim(), m);
    }
  }
  return out;
}

// Union-find over (generator, coord) blocks so the null space is computed per
// coupled block instead of on the whole stacked vector.
struct BlockSets {
  std::vector<int> parent;
  explicit BlockSets(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
  void join(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

LinearConstraintSystem::LinearConstraintSystem(ConstraintSpec spec, Resolution res,
                                               std::vector<Relation> relations)
    : spec_(std::move(spec)), res_(res), dim_(spec_.dim()), generators_(spec_.generator_count()),
      relations_(std::move(relations)), bodies_(body_layout(spec_)),
      synthesis_(synthesis_matrix(res.k_max, res.m_samples)) {
  const int width = coeffs_per_coord();
  const int blocks = generators_ * dim_;
  auto block_id = [this](int g, int c) { return g * dim_ + c; };

  BlockSets sets(blocks);
  for (const auto& r : relations_) {
    for (const auto& t : r.terms) sets.join(block_id(r.terms.front().generator, r.terms.front().coord), block_id(t.generator, t.coord));
  }

  basis_ = Eigen::MatrixXd::Zero(full_size(), 0);
  std::vector<Eigen::MatrixXd> pieces;
  std::vector<std::vector<int>> piece_blocks;
  for (int root = 0; root < blocks; ++root) {
    if (sets.find(root) != root) continue;
    std::vector<int> members;
    for (int b = 0; b < blocks; ++b) {
      if (sets.find(b) == root) members.push_back(b);
    }
    auto local_col = [&](int block) {
      return static_cast<int>(std::find(members.begin(), members.end(), block) - members.begin()) * width;
    };
    std::vector<const Relation*> rows;
    for (const auto& r : relations_) {
      const auto& t0 = r.terms.front();
      if (sets.find(block_id(t0.generator, t0.coord)) == root) rows.push_back(&r);
    }
    const int cols = static_cast<int>(members.size()) * width;
    Eigen::MatrixXd null_basis;
    if (rows.empty()) {
      null_basis = Eigen::MatrixXd::Identity(cols, cols);
    } else {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), cols);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& t : rows[i]->terms) {
          a.row(static_cast<Eigen::Index>(i)).segment(local_col(block_id(t.generator, t.coord)), width) +=
              t.weight * synthesis_.row(t.index);
        }
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      const double cutoff = 1e-9 * (sv.size() > 0 ? sv(0) : 0.0);
      int rank = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
      }
      null_basis = svd.matrixV().rightCols(cols - rank);
    }
    pieces.push_back(null_basis);
    piece_blocks.push_back(members);
  }

  int total = 0;
  for (const auto& p : pieces) total += static_cast<int>(p.cols());
  basis_ = Eigen::MatrixXd::Zero(full_size(), total);
  int col = 0;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    for (std::size_t mb = 0; mb < piece_blocks[p].size(); ++mb) {
      const int block = piece_blocks[p][mb];
      basis_.block(static_cast<Eigen::Index>(block) * width, col, width, pieces[p].cols()) =
          pieces[p].middleRows(static_cast<Eigen::Index>(mb) * width, width);
    }
    col += static_cast<int>(pieces[p].cols());
  }
}

std::size_t LinearConstraintSystem::block_offset(int generator, int coord) const {
  return static_cast<std::size_t>(generator * dim_ + coord) * coeffs_per_coord();
}

Eigen::MatrixXd LinearConstraintSystem::projector() const { return basis_ * basis_.transpose(); }

Eigen::VectorXd LinearConstraintSystem::project(const Eigen::VectorXd& x) const {
  return basis_ * (basis_.transpose() * x);
}

std::vector<Eigen::MatrixXd> LinearConstraintSystem::generator_samples(const Eigen::VectorXd& x) const {
  if (x.size() != full_size()) throw DimensionError("coefficient vector has the wrong length");
  const int width = coeffs_per_coord();
  std::vector<Eigen::MatrixXd> out;
  for (int g = 0; g < generators_; ++g) {
    Eigen::MatrixXd s(res_.m_samples, dim_);
    for (int c = 0; c < dim_; ++c) {
      s.col(c) = synthesis_ * x.segment(static_cast<Eigen::Index>(block_offset(g, c)), width);
    }
    out.push_back(std::move(s));
  }
  return out;
}

double LinearConstraintSystem::residual(const Eigen::VectorXd& x) const {
  const auto samples = generator_samples(x);
  double worst = 0.0;
  for (const auto& r : relations_) {
    double v = 0.0;
    for (const auto& t : r.terms) v += t.weight * samples[t.generator](t.index, t.coord);
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

int LinearConstraintSystem::shift_index(const BodyRef& body) const {
  return shift_to_index(body.shift, res_.m_samples);
}

LinearConstraintSystem compile(const ConstraintSpec& spec, Resolution res, RelationFilter filter) {
  spec.validate();
  const std::int64_t l = spec.lattice_modulus();
  if (res.m_samples % l != 0) {
    throw ModulusError(static_cast<long>(l), "sample count " + std::to_string(res.m_samples) +
                                                 " is not a multiple of the lattice modulus L = " +
                                                 std::to_string(l));
  }
  if (res.k_max < 1 || res.m_samples < 2 * res.k_max + 2) {
    throw AliasingError("sample count " + std::to_string(res.m_samples) + " cannot resolve " +
                        std::to_string(res.k_max) + " harmonics");
  }
  return LinearConstraintSystem(spec, res, build_relations(spec, res.m_samples, filter));
}

Eigen::VectorXd pack_generators(const std::vector<FourierLoop>& generators,
                                const LinearConstraintSystem& system) {
  if (static_cast<int>(generators.size()) != system.generator_count()) {
    throw ArityError("expected " + std::to_string(system.generator_count()) + " generator loop(s), got " +
                     std::to_string(generators.size()));
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(system.full_size());
  for (int g = 0; g < system.generator_count(); ++g) {
    const auto& loop = generators[g];
    if (loop.dim() != system.dim()) throw DimensionError("generator dimension does not match the spec");
    const int k = std::min(loop.k_max(), system.resolution().k_max);
    for (int c = 0; c < system.dim(); ++c) {
      const auto off = static_cast<Eigen::Index>(system.block_offset(g, c));
      x(off) = loop.constant(c);
      for (int h = 1; h <= k; ++h) {
        x(off + 2 * h - 1) = loop.cos_coeff(c, h);
        x(off + 2 * h) = loop.sin_coeff(c, h);
      }
    }
  }
  return x;
}

std::vector<FourierLoop> unpack_generators(const Eigen::VectorXd& x, const LinearConstraintSystem& system,
                                           double period) {
  std::vector<FourierLoop> out;
  const int width = system.coeffs_per_coord();
  for (int g = 0; g < system.generator_count(); ++g) {
    FourierLoop loop(period, system.dim(), system.resolution().k_max);
    for (int c = 0; c < system.dim(); ++c) {
      const auto off = static_cast<Eigen::Index>(system.block_offset(g, c));
      for (int i = 0; i < width; ++i) loop.data()[static_cast<std::size_t>(c) * width + i] = x(off + i);
    }
    out.push_back(std::move(loop));
  }
  return out;
}

double residual(const LinearConstraintSystem& system, const std::vector<FourierLoop>& generators) {
  return system.residual(pack_generators(generators, system));
}

std::vector<FourierLoop> body_trajectories(const ConstraintSpec& spec, const std::vector<FourierLoop>& generators) {
  if (static_cast<int>(generators.size()) != spec.generator_count()) {
    throw ArityError(family_name(spec.family) + " expects " + std::to_string(spec.generator_count()) +
                     " generator loop(s), got " + std::to_string(generators.size()));
  }
  std::vector<FourierLoop> out;
  for (const auto& b : body_layout(spec)) {
    const auto& gen = generators[b.generator];
    if (gen.dim() != spec.dim()) throw DimensionError("generator dimension does not match the spec");
    out.push_back(flip_coordinates(time_shift(gen, b.shift), b.signs));
  }
  return out;
}

}  // namespace choreo
