#pragma once

// Finite groups, probability measures on them, and unitary representations.

#include <memory>
#include <string>
#include <vector>

#include "pettis/operator_core.hpp"
#include "pettis/random.hpp"

namespace pettis {

class FiniteGroup;
using GroupPtr = std::shared_ptr<const FiniteGroup>;

// Elements are the dense indices 0..order-1.
class FiniteGroup {
 public:
  // Validates the table: Latin square, a two-sided identity, inverses, and
  // (for order <= 64) associativity on every triple.
  static GroupPtr from_table(std::string name, std::vector<std::vector<int>> mul);
  static GroupPtr cyclic(int n);
  // Z_{n1} x ... x Z_{nk}; element index is mixed radix, last factor fastest.
  static GroupPtr direct_product(const std::vector<int>& factors);
  // S_n with elements enumerated in lexicographic order, mul(a, b) = a after b.
  static GroupPtr symmetric(int n);

  const std::string& name() const { return name_; }
  int order() const { return static_cast<int>(mul_.size()); }
  int mul(int a, int b) const { return mul_[a][b]; }
  int identity() const { return identity_; }
  int inverse(int a) const { return inverse_[a]; }
  bool is_abelian() const;
  bool contains(int g) const { return g >= 0 && g < order(); }

  // Nonempty only for cyclic and direct-product groups.
  const std::vector<int>& cyclic_factors() const { return factors_; }
  std::vector<int> coordinates(int g) const;
  int from_coordinates(const std::vector<int>& coords) const;

  // Nonempty only for symmetric groups: permutations()[g][i] = g(i).
  const std::vector<std::vector<int>>& permutations() const { return perms_; }

 private:
  FiniteGroup() = default;

  std::string name_;
  std::vector<std::vector<int>> mul_;
  int identity_ = 0;
  std::vector<int> inverse_;
  std::vector<int> factors_;
  std::vector<std::vector<int>> perms_;
};

class GroupMeasure {
 public:
  GroupMeasure(GroupPtr group, std::vector<double> weights);

  static GroupMeasure point_mass(GroupPtr group, int g);

  const GroupPtr& group() const { return group_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(int g) const { return weights_.at(static_cast<std::size_t>(g)); }
  // mu(E) for E given as a list of distinct elements.
  double measure(const std::vector<int>& elements) const;

 private:
  GroupPtr group_;
  std::vector<double> weights_;
};

GroupMeasure convolve(const GroupMeasure& mu, const GroupMeasure& nu);
GroupMeasure convolution_power(const GroupMeasure& mu, int n);
// (L_h mu)(g) = mu(h g).
GroupMeasure left_shift_measure(int h, const GroupMeasure& mu);
GroupMeasure haar_uniform(GroupPtr group);
double total_variation(const GroupMeasure& mu, const GroupMeasure& nu);
bool is_left_invariant(const GroupMeasure& mu);
GroupMeasure random_measure(Rng& rng, GroupPtr group);

class UnitaryRepresentation {
 public:
  // Checks unitarity of every image and the homomorphism law on all pairs.
  UnitaryRepresentation(GroupPtr group, std::vector<Matrix> images);

  const GroupPtr& group() const { return group_; }
  Index dim() const { return images_.front().rows(); }
  const Matrix& image(int g) const { return images_.at(static_cast<std::size_t>(g)); }
  const std::vector<Matrix>& images() const { return images_; }

 private:
  GroupPtr group_;
  std::vector<Matrix> images_;
};

UnitaryRepresentation regular_representation(GroupPtr group);
UnitaryRepresentation trivial_representation(GroupPtr group, Index dim);
// Diagonal sum of characters of a product of cyclic groups; characters[i]
// lists one exponent per cyclic factor.
UnitaryRepresentation character_representation(GroupPtr group,
                                               const std::vector<std::vector<int>>& characters);
UnitaryRepresentation symmetric_natural(GroupPtr group);
UnitaryRepresentation symmetric_sign(GroupPtr group);
// Natural representation restricted to the sum-zero subspace.
UnitaryRepresentation symmetric_standard(GroupPtr group);
UnitaryRepresentation conjugated(const UnitaryRepresentation& rep, const Matrix& u);
UnitaryRepresentation direct_sum(const UnitaryRepresentation& a, const UnitaryRepresentation& b);
// A representation of the requested dimension built from the irreducible
// pieces available for the group, conjugated by a Haar unitary.
UnitaryRepresentation random_representation(Rng& rng, GroupPtr group, Index dim);

// Closes a finite set of unitaries under multiplication; the resulting group
// carries the matrices as its defining representation. Fails with
// kTermBudgetExceeded beyond max_order elements.
UnitaryRepresentation matrix_group_closure(std::string name,
                                           const std::vector<Matrix>& generators,
                                           int max_order = 256);

}  // namespace pettis
