#include <gtest/gtest.h>

#include <vector>

#include "oracles.hpp"
#include "pettis/error.hpp"
#include "pettis/group_measure.hpp"

using namespace pettis;

namespace {

void expect_weights(const GroupMeasure& mu, const std::vector<double>& expected, double tol = 1e-12) {
  ASSERT_EQ(mu.weights().size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(mu.weights()[i], expected[i], tol) << i;
}

std::vector<GroupPtr> small_groups() {
  return {FiniteGroup::cyclic(2), FiniteGroup::cyclic(3), FiniteGroup::cyclic(4),
          FiniteGroup::cyclic(6), FiniteGroup::direct_product({2, 2}), FiniteGroup::direct_product({2, 3}),
          FiniteGroup::symmetric(3), FiniteGroup::direct_product({3, 4})};
}

}  // namespace

TEST(GroupMeasure, PointMassesConvolveToProduct) {
  const GroupPtr s3 = FiniteGroup::symmetric(3);
  for (int g = 0; g < 6; ++g) {
    for (int h = 0; h < 6; ++h) {
      const GroupMeasure c = convolve(GroupMeasure::point_mass(s3, g), GroupMeasure::point_mass(s3, h));
      EXPECT_NEAR(c.weight(s3->mul(g, h)), 1.0, 1e-15);
    }
  }
}

TEST(GroupMeasure, TwoPointSquare) {
  const GroupPtr z2 = FiniteGroup::cyclic(2);
  const GroupMeasure mu(z2, {0.3, 0.7});
  expect_weights(convolve(mu, mu), {0.58, 0.42});
}

TEST(GroupMeasure, UniformAbsorbs) {
  const GroupPtr z6 = FiniteGroup::cyclic(6);
  Rng rng(1);
  const GroupMeasure mu = random_measure(rng, z6);
  expect_weights(convolve(haar_uniform(z6), mu), std::vector<double>(6, 1.0 / 6.0));
  expect_weights(convolve(mu, haar_uniform(z6)), std::vector<double>(6, 1.0 / 6.0));
}

TEST(GroupMeasure, ConvolutionMatchesDoubleSum) {
  Rng rng(7);
  for (const GroupPtr& g : small_groups()) {
    const GroupMeasure mu = random_measure(rng, g), nu = random_measure(rng, g);
    const auto ref = oracle::convolve(mu.weights(), nu.weights(), [&](int a, int b) { return g->mul(a, b); });
    expect_weights(convolve(mu, nu), ref);
  }
}

TEST(GroupMeasure, ConvolutionIsAssociative) {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    for (const GroupPtr& g : small_groups()) {
      const GroupMeasure a = random_measure(rng, g), b = random_measure(rng, g), c = random_measure(rng, g);
      expect_weights(convolve(convolve(a, b), c), convolve(a, convolve(b, c)).weights());
    }
  }
}

TEST(GroupMeasure, ConvolutionPowers) {
  const GroupPtr z4 = FiniteGroup::cyclic(4);
  const GroupMeasure half(z4, {0.5, 0.5, 0.0, 0.0});
  expect_weights(convolution_power(half, 2), {0.25, 0.5, 0.25, 0.0});
  expect_weights(convolution_power(half, 1), half.weights());
  expect_weights(convolution_power(GroupMeasure::point_mass(z4, 1), 3), {0.0, 0.0, 0.0, 1.0});
  expect_weights(convolution_power(GroupMeasure::point_mass(z4, 3), 3), {0.0, 1.0, 0.0, 0.0});
}

TEST(GroupMeasure, LeftShift) {
  const GroupPtr z3 = FiniteGroup::cyclic(3);
  const GroupMeasure mu(z3, {0.5, 0.3, 0.2});
  expect_weights(left_shift_measure(1, mu), {0.3, 0.2, 0.5});
  expect_weights(left_shift_measure(0, mu), mu.weights());
  expect_weights(left_shift_measure(2, haar_uniform(z3)), haar_uniform(z3).weights());
}

TEST(GroupMeasure, HaarAndInvariance) {
  expect_weights(haar_uniform(FiniteGroup::cyclic(2)), {0.5, 0.5});
  expect_weights(haar_uniform(FiniteGroup::symmetric(3)), std::vector<double>(6, 1.0 / 6.0));
  for (const GroupPtr& g : small_groups()) {
    const GroupMeasure h = haar_uniform(g);
    expect_weights(convolve(h, h), h.weights());
    EXPECT_TRUE(is_left_invariant(h));
    EXPECT_FALSE(is_left_invariant(GroupMeasure::point_mass(g, g->identity())));
  }
  const GroupPtr z4 = FiniteGroup::cyclic(4);
  const GroupMeasure half(z4, {0.5, 0.5, 0.0, 0.0});
  EXPECT_FALSE(is_left_invariant(half));
  expect_weights(left_shift_measure(1, half), {0.5, 0.0, 0.0, 0.5});
}

TEST(GroupMeasure, TotalVariation) {
  const GroupPtr z2 = FiniteGroup::cyclic(2);
  const GroupMeasure a(z2, {0.3, 0.7}), b(z2, {0.7, 0.3});
  EXPECT_NEAR(total_variation(a, b), 0.4, 1e-12);
  EXPECT_NEAR(total_variation(a, a), 0.0, 1e-15);
  EXPECT_NEAR(total_variation(GroupMeasure::point_mass(z2, 0), GroupMeasure::point_mass(z2, 1)), 1.0, 1e-15);
  Rng rng(3);
  const GroupPtr s3 = FiniteGroup::symmetric(3);
  const GroupMeasure x = random_measure(rng, s3), y = random_measure(rng, s3);
  EXPECT_NEAR(total_variation(x, y), oracle::total_variation(x.weights(), y.weights()), 1e-15);
}

TEST(GroupMeasure, SymmetricGroupIsNonAbelianOfOrderSix) {
  const GroupPtr s3 = FiniteGroup::symmetric(3);
  EXPECT_EQ(s3->order(), 6);
  EXPECT_FALSE(s3->is_abelian());
  EXPECT_TRUE(FiniteGroup::direct_product({2, 2})->is_abelian());
}

TEST(GroupMeasure, RejectsBadInput) {
  const GroupPtr z2 = FiniteGroup::cyclic(2);
  EXPECT_THROW(GroupMeasure(z2, {0.5, 0.6}), Error);
  EXPECT_THROW(GroupMeasure(z2, {1.2, -0.2}), Error);
  EXPECT_THROW(GroupMeasure(z2, {1.0}), Error);
  EXPECT_THROW(convolve(GroupMeasure(z2, {0.5, 0.5}), haar_uniform(FiniteGroup::cyclic(3))), Error);
  EXPECT_THROW(FiniteGroup::from_table("bad", {{0, 1}, {0, 1}}), Error);
  try {
    convolve(GroupMeasure(z2, {0.5, 0.5}), haar_uniform(FiniteGroup::cyclic(3)));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGroupMismatch);
  }
}

TEST(GroupMeasure, RepresentationsAreHomomorphisms) {
  Rng rng(21);
  for (const GroupPtr& g : small_groups()) {
    for (Index d = 2; d <= 4; ++d) {
      const UnitaryRepresentation rep = random_representation(rng, g, d);
      ASSERT_EQ(rep.dim(), d);
      for (int a = 0; a < g->order(); ++a) {
        EXPECT_TRUE(is_unitary(rep.image(a)));
        for (int b = 0; b < g->order(); ++b) {
          EXPECT_LT(oracle::frobenius(oracle::multiply(rep.image(a), rep.image(b)), rep.image(g->mul(a, b))),
                    1e-10);
        }
      }
    }
  }
}

TEST(GroupMeasure, RepresentationRejectsNonHomomorphism) {
  const GroupPtr z2 = FiniteGroup::cyclic(2);
  Matrix x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  Matrix z(2, 2);
  z << 1.0, 0.0, 0.0, Complex(0, 1);
  EXPECT_THROW(UnitaryRepresentation(z2, {Matrix::Identity(2, 2), z}), Error);
  EXPECT_NO_THROW(UnitaryRepresentation(z2, {Matrix::Identity(2, 2), x}));
}
