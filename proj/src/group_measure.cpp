#include "pettis/group_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pettis/error.hpp"

namespace pettis {
namespace {

constexpr double kWeightTol = 1e-12;

void require_same_group(const GroupPtr& a, const GroupPtr& b) {
  if (a != b && !(a && b && a->name() == b->name() && a->order() == b->order())) {
    fail(ErrorCode::kGroupMismatch,
         "measures live on different groups (" + (a ? a->name() : "?") + " vs " +
             (b ? b->name() : "?") + ")");
  }
}

}  // namespace

GroupPtr FiniteGroup::from_table(std::string name, std::vector<std::vector<int>> mul) {
  const int n = static_cast<int>(mul.size());
  if (n == 0) fail(ErrorCode::kInvariantViolation, "group table is empty");
  for (const auto& row : mul) {
    if (static_cast<int>(row.size()) != n) {
      fail(ErrorCode::kInvariantViolation, "group table is not square");
    }
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int x : row) {
      if (x < 0 || x >= n || seen[x]) {
        fail(ErrorCode::kInvariantViolation, "group table row is not a permutation");
      }
      seen[x] = true;
    }
  }
  for (int b = 0; b < n; ++b) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int a = 0; a < n; ++a) {
      if (seen[mul[a][b]]) {
        fail(ErrorCode::kInvariantViolation, "group table column is not a permutation");
      }
      seen[mul[a][b]] = true;
    }
  }
  int identity = -1;
  for (int e = 0; e < n && identity < 0; ++e) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) ok = mul[e][a] == a && mul[a][e] == a;
    if (ok) identity = e;
  }
  if (identity < 0) fail(ErrorCode::kInvariantViolation, "group table has no identity");
  if (n <= 64) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          if (mul[mul[a][b]][c] != mul[a][mul[b][c]]) {
            fail(ErrorCode::kInvariantViolation,
                 "group table is not associative at (" + std::to_string(a) + "," +
                     std::to_string(b) + "," + std::to_string(c) + ")");
          }
        }
      }
    }
  }
  std::vector<int> inverse(static_cast<std::size_t>(n), -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (mul[a][b] == identity && mul[b][a] == identity) inverse[a] = b;
    }
    if (inverse[a] < 0) fail(ErrorCode::kInvariantViolation, "element without inverse");
  }
  auto g = std::shared_ptr<FiniteGroup>(new FiniteGroup());
  g->name_ = std::move(name);
  g->mul_ = std::move(mul);
  g->identity_ = identity;
  g->inverse_ = std::move(inverse);
  return g;
}

GroupPtr FiniteGroup::cyclic(int n) {
  return direct_product({n});
}

GroupPtr FiniteGroup::direct_product(const std::vector<int>& factors) {
  if (factors.empty()) fail(ErrorCode::kInvalidArgument, "direct product of no factors");
  int order = 1;
  std::string name;
  for (int f : factors) {
    if (f < 1) fail(ErrorCode::kInvalidArgument, "cyclic factor must be positive");
    order *= f;
    if (order > 4096) fail(ErrorCode::kInvalidArgument, "group order above 4096");
    name += (name.empty() ? "Z" : "xZ") + std::to_string(f);
  }
  auto decode = [&](int g) {
    std::vector<int> c(factors.size());
    for (std::size_t i = factors.size(); i-- > 0;) {
      c[i] = g % factors[i];
      g /= factors[i];
    }
    return c;
  };
  auto encode = [&](const std::vector<int>& c) {
    int g = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) g = g * factors[i] + c[i];
    return g;
  };
  std::vector<std::vector<int>> mul(static_cast<std::size_t>(order),
                                    std::vector<int>(static_cast<std::size_t>(order)));
  for (int a = 0; a < order; ++a) {
    const auto ca = decode(a);
    for (int b = 0; b < order; ++b) {
      auto cb = decode(b);
      for (std::size_t i = 0; i < factors.size(); ++i) cb[i] = (ca[i] + cb[i]) % factors[i];
      mul[a][b] = encode(cb);
    }
  }
  auto g = std::const_pointer_cast<FiniteGroup>(from_table(name, std::move(mul)));
  g->factors_ = factors;
  return g;
}

GroupPtr FiniteGroup::symmetric(int n) {
  if (n < 1 || n > 5) fail(ErrorCode::kInvalidArgument, "symmetric group degree must be 1..5");
  std::vector<std::vector<int>> perms;
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  const int order = static_cast<int>(perms.size());
  auto index_of = [&](const std::vector<int>& q) {
    return static_cast<int>(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
  };
  std::vector<std::vector<int>> mul(static_cast<std::size_t>(order),
                                    std::vector<int>(static_cast<std::size_t>(order)));
  for (int a = 0; a < order; ++a) {
    for (int b = 0; b < order; ++b) {
      std::vector<int> q(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) q[i] = perms[a][perms[b][i]];
      mul[a][b] = index_of(q);
    }
  }
  auto g = std::const_pointer_cast<FiniteGroup>(
      from_table("S" + std::to_string(n), std::move(mul)));
  g->perms_ = std::move(perms);
  return g;
}

bool FiniteGroup::is_abelian() const {
  for (int a = 0; a < order(); ++a) {
    for (int b = 0; b < a; ++b) {
      if (mul_[a][b] != mul_[b][a]) return false;
    }
  }
  return true;
}

std::vector<int> FiniteGroup::coordinates(int g) const {
  if (factors_.empty()) fail(ErrorCode::kInvalidArgument, name_ + " has no cyclic coordinates");
  std::vector<int> c(factors_.size());
  for (std::size_t i = factors_.size(); i-- > 0;) {
    c[i] = g % factors_[i];
    g /= factors_[i];
  }
  return c;
}

int FiniteGroup::from_coordinates(const std::vector<int>& coords) const {
  if (coords.size() != factors_.size()) {
    fail(ErrorCode::kInvalidArgument, "coordinate count does not match " + name_);
  }
  int g = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int f = factors_[i];
    g = g * f + ((coords[i] % f) + f) % f;
  }
  return g;
}

GroupMeasure::GroupMeasure(GroupPtr group, std::vector<double> weights)
    : group_(std::move(group)), weights_(std::move(weights)) {
  if (!group_) fail(ErrorCode::kInvalidArgument, "measure without a group");
  if (static_cast<int>(weights_.size()) != group_->order()) {
    fail(ErrorCode::kInvariantViolation, "measure has " + std::to_string(weights_.size()) +
                                             " weights for a group of order " +
                                             std::to_string(group_->order()));
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) fail(ErrorCode::kInvariantViolation, "negative measure weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightTol) {
    fail(ErrorCode::kInvariantViolation, "measure weights sum to " + std::to_string(total));
  }
}

GroupMeasure GroupMeasure::point_mass(GroupPtr group, int g) {
  if (!group->contains(g)) fail(ErrorCode::kInvalidArgument, "point mass at a non-element");
  std::vector<double> w(static_cast<std::size_t>(group->order()), 0.0);
  w[g] = 1.0;
  return GroupMeasure(std::move(group), std::move(w));
}

double GroupMeasure::measure(const std::vector<int>& elements) const {
  double total = 0.0;
  for (int g : elements) total += weight(g);
  return total;
}

GroupMeasure convolve(const GroupMeasure& mu, const GroupMeasure& nu) {
  require_same_group(mu.group(), nu.group());
  const auto& g = *mu.group();
  std::vector<double> out(static_cast<std::size_t>(g.order()), 0.0);
  for (int a = 0; a < g.order(); ++a) {
    if (mu.weight(a) == 0.0) continue;
    for (int b = 0; b < g.order(); ++b) out[g.mul(a, b)] += mu.weight(a) * nu.weight(b);
  }
  return GroupMeasure(mu.group(), std::move(out));
}

GroupMeasure convolution_power(const GroupMeasure& mu, int n) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, "convolution power needs n >= 1");
  GroupMeasure acc = mu;
  for (int k = 1; k < n; ++k) acc = convolve(acc, mu);
  return acc;
}

GroupMeasure left_shift_measure(int h, const GroupMeasure& mu) {
  const auto& g = *mu.group();
  if (!g.contains(h)) fail(ErrorCode::kInvalidArgument, "shift by a non-element");
  std::vector<double> out(static_cast<std::size_t>(g.order()));
  for (int x = 0; x < g.order(); ++x) out[x] = mu.weight(g.mul(h, x));
  return GroupMeasure(mu.group(), std::move(out));
}

GroupMeasure haar_uniform(GroupPtr group) {
  const int n = group->order();
  return GroupMeasure(std::move(group),
                      std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));
}

double total_variation(const GroupMeasure& mu, const GroupMeasure& nu) {
  require_same_group(mu.group(), nu.group());
  double s = 0.0;
  for (std::size_t i = 0; i < mu.weights().size(); ++i) {
    s += std::abs(mu.weights()[i] - nu.weights()[i]);
  }
  return 0.5 * s;
}

bool is_left_invariant(const GroupMeasure& mu) {
  for (int h = 0; h < mu.group()->order(); ++h) {
    if (total_variation(mu, left_shift_measure(h, mu)) >= 1e-12) return false;
  }
  return true;
}

GroupMeasure random_measure(Rng& rng, GroupPtr group) {
  auto w = random_simplex(rng, static_cast<std::size_t>(group->order()));
  return GroupMeasure(std::move(group), std::move(w));
}

UnitaryRepresentation::UnitaryRepresentation(GroupPtr group, std::vector<Matrix> images)
    : group_(std::move(group)), images_(std::move(images)) {
  if (!group_) fail(ErrorCode::kInvalidArgument, "representation without a group");
  if (static_cast<int>(images_.size()) != group_->order()) {
    fail(ErrorCode::kInvariantViolation, "representation needs one image per element");
  }
  const Index d = images_.front().rows();
  for (const auto& u : images_) {
    if (u.rows() != d || !is_unitary(u)) {
      fail(ErrorCode::kInvariantViolation, "representation image is not a unitary of dim " +
                                               std::to_string(d));
    }
  }
  for (int a = 0; a < group_->order(); ++a) {
    for (int b = 0; b < group_->order(); ++b) {
      const double err = (images_[a] * images_[b] - images_[group_->mul(a, b)]).norm();
      if (err > 1e-10) {
        fail(ErrorCode::kInvariantViolation,
             "homomorphism law fails at (" + std::to_string(a) + "," + std::to_string(b) +
                 "), error " + std::to_string(err));
      }
    }
  }
}

UnitaryRepresentation regular_representation(GroupPtr group) {
  const int n = group->order();
  std::vector<Matrix> images;
  for (int g = 0; g < n; ++g) {
    Matrix m = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) m(group->mul(g, x), x) = 1.0;
    images.push_back(std::move(m));
  }
  return UnitaryRepresentation(std::move(group), std::move(images));
}

UnitaryRepresentation trivial_representation(GroupPtr group, Index dim) {
  std::vector<Matrix> images(static_cast<std::size_t>(group->order()),
                             Matrix::Identity(dim, dim));
  return UnitaryRepresentation(std::move(group), std::move(images));
}

UnitaryRepresentation character_representation(GroupPtr group,
                                               const std::vector<std::vector<int>>& characters) {
  const auto& factors = group->cyclic_factors();
  if (factors.empty()) {
    fail(ErrorCode::kInvalidArgument, group->name() + " is not a product of cyclic groups");
  }
  if (characters.empty()) fail(ErrorCode::kInvalidArgument, "no characters given");
  const Index d = static_cast<Index>(characters.size());
  std::vector<Matrix> images;
  for (int g = 0; g < group->order(); ++g) {
    const auto c = group->coordinates(g);
    Matrix m = Matrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) {
      const auto& chi = characters[static_cast<std::size_t>(k)];
      if (chi.size() != factors.size()) {
        fail(ErrorCode::kInvalidArgument, "character needs one exponent per factor");
      }
      double phase = 0.0;
      for (std::size_t i = 0; i < factors.size(); ++i) {
        phase += static_cast<double>((chi[i] * c[i]) % factors[i]) / factors[i];
      }
      m(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * phase);
    }
    images.push_back(std::move(m));
  }
  return UnitaryRepresentation(std::move(group), std::move(images));
}

namespace {

const std::vector<std::vector<int>>& require_perms(const GroupPtr& group) {
  if (group->permutations().empty()) {
    fail(ErrorCode::kInvalidArgument, group->name() + " is not a symmetric group");
  }
  return group->permutations();
}

int permutation_sign(const std::vector<int>& p) {
  int inversions = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) inversions += p[i] > p[j];
  }
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace

UnitaryRepresentation symmetric_natural(GroupPtr group) {
  const auto& perms = require_perms(group);
  const Index n = static_cast<Index>(perms.front().size());
  std::vector<Matrix> images;
  for (const auto& p : perms) {
    Matrix m = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) m(p[i], i) = 1.0;
    images.push_back(std::move(m));
  }
  return UnitaryRepresentation(std::move(group), std::move(images));
}

UnitaryRepresentation symmetric_sign(GroupPtr group) {
  const auto& perms = require_perms(group);
  std::vector<Matrix> images;
  for (const auto& p : perms) images.push_back(Matrix::Constant(1, 1, permutation_sign(p)));
  return UnitaryRepresentation(std::move(group), std::move(images));
}

UnitaryRepresentation symmetric_standard(GroupPtr group) {
  const auto& perms = require_perms(group);
  const Index n = static_cast<Index>(perms.front().size());
  if (n < 2) fail(ErrorCode::kInvalidArgument, "standard representation needs degree >= 2");
  // Orthonormal basis of the complement of (1,...,1): Gram-Schmidt on e_0 - e_k.
  Matrix basis(n, n - 1);
  for (Index k = 1; k < n; ++k) {
    Vector v = Vector::Zero(n);
    v(0) = 1.0;
    v(k) = -1.0;
    for (Index j = 0; j < k - 1; ++j) v -= basis.col(j).dot(v) * basis.col(j);
    basis.col(k - 1) = v / v.norm();
  }
  const UnitaryRepresentation natural = symmetric_natural(group);
  std::vector<Matrix> images;
  for (const auto& m : natural.images()) images.push_back(basis.adjoint() * m * basis);
  return UnitaryRepresentation(std::move(group), std::move(images));
}

UnitaryRepresentation conjugated(const UnitaryRepresentation& rep, const Matrix& u) {
  if (u.rows() != rep.dim() || !is_unitary(u)) {
    fail(ErrorCode::kInvalidArgument, "conjugation needs a unitary of matching dimension");
  }
  std::vector<Matrix> images;
  for (const auto& m : rep.images()) images.push_back(u * m * u.adjoint());
  return UnitaryRepresentation(rep.group(), std::move(images));
}

UnitaryRepresentation direct_sum(const UnitaryRepresentation& a, const UnitaryRepresentation& b) {
  require_same_group(a.group(), b.group());
  const Index d = a.dim() + b.dim();
  std::vector<Matrix> images;
  for (int g = 0; g < a.group()->order(); ++g) {
    Matrix m = Matrix::Zero(d, d);
    m.topLeftCorner(a.dim(), a.dim()) = a.image(g);
    m.bottomRightCorner(b.dim(), b.dim()) = b.image(g);
    images.push_back(std::move(m));
  }
  return UnitaryRepresentation(a.group(), std::move(images));
}

UnitaryRepresentation random_representation(Rng& rng, GroupPtr group, Index dim) {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "representation dimension must be positive");
  if (!group->cyclic_factors().empty()) {
    const auto& factors = group->cyclic_factors();
    std::vector<std::vector<int>> chars;
    for (Index k = 0; k < dim; ++k) {
      std::vector<int> chi;
      for (int f : factors) chi.push_back(std::uniform_int_distribution<int>(0, f - 1)(rng));
      chars.push_back(std::move(chi));
    }
    return conjugated(character_representation(group, chars), random_unitary(rng, dim));
  }
  if (!group->permutations().empty()) {
    const Index degree = static_cast<Index>(group->permutations().front().size());
    std::vector<UnitaryRepresentation> pieces;
    pieces.push_back(trivial_representation(group, 1));
    pieces.push_back(symmetric_sign(group));
    if (degree >= 2) pieces.push_back(symmetric_standard(group));
    std::optional<UnitaryRepresentation> acc;
    Index have = 0;
    while (have < dim) {
      std::vector<std::size_t> fitting;
      for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (pieces[i].dim() <= dim - have) fitting.push_back(i);
      }
      const auto pick =
          fitting[std::uniform_int_distribution<std::size_t>(0, fitting.size() - 1)(rng)];
      acc = acc ? direct_sum(*acc, pieces[pick]) : pieces[pick];
      have += pieces[pick].dim();
    }
    return conjugated(*acc, random_unitary(rng, dim));
  }
  if (dim == group->order()) {
    return conjugated(regular_representation(group), random_unitary(rng, dim));
  }
  fail(ErrorCode::kInvalidArgument,
       "no random representation of dim " + std::to_string(dim) + " for " + group->name());
}

UnitaryRepresentation matrix_group_closure(std::string name,
                                           const std::vector<Matrix>& generators,
                                           int max_order) {
  if (generators.empty()) fail(ErrorCode::kInvalidArgument, "closure of no generators");
  const Index d = generators.front().rows();
  for (const auto& g : generators) {
    if (g.rows() != d || !is_unitary(g)) {
      fail(ErrorCode::kInvalidArgument, "closure generators must be unitaries of equal dim");
    }
  }
  std::vector<Matrix> elements{Matrix::Identity(d, d)};
  auto find = [&](const Matrix& m) -> int {
    for (std::size_t i = 0; i < elements.size(); ++i) {
      if ((elements[i] - m).norm() < 1e-9) return static_cast<int>(i);
    }
    return -1;
  };
  for (std::size_t next = 0; next < elements.size(); ++next) {
    for (const auto& g : generators) {
      Matrix m = g * elements[next];
      if (find(m) < 0) {
        if (static_cast<int>(elements.size()) >= max_order) {
          fail(ErrorCode::kTermBudgetExceeded,
               "matrix group exceeds " + std::to_string(max_order) + " elements");
        }
        elements.push_back(std::move(m));
      }
    }
  }
  const int n = static_cast<int>(elements.size());
  std::vector<std::vector<int>> mul(static_cast<std::size_t>(n),
                                    std::vector<int>(static_cast<std::size_t>(n)));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) mul[a][b] = find(elements[a] * elements[b]);
  }
  auto group = FiniteGroup::from_table(std::move(name), std::move(mul));
  return UnitaryRepresentation(std::move(group), std::move(elements));
}

}  // namespace pettis
