#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pettis/error.hpp"
#include "pettis/operator_core.hpp"
#include "pettis/random.hpp"

using namespace pettis;

namespace {

Vector plus_state() {
  Vector u(2);
  u << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return u;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(OperatorCore, VectorStateIsOuterProduct) {
  Vector u(2);
  u << 1.0 / std::sqrt(2.0), Complex(0.0, 1.0 / std::sqrt(2.0));
  const DensityState rho = vector_state(u);
  EXPECT_NEAR(std::abs(rho.matrix()(0, 0) - 0.5), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(rho.matrix()(0, 1) - Complex(0.0, -0.5)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(rho.matrix()(1, 0) - Complex(0.0, 0.5)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(rho.matrix()(1, 1) - 0.5), 0.0, 1e-12);
  EXPECT_NEAR(purity_degree(rho), 1.0, 1e-12);
}

TEST(OperatorCore, ExpectationMatchesLoopTrace) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 1 + trial % 5;
    const DensityState rho = random_density(rng, d);
    const HermitianOperator a(random_hermitian(rng, d));
    EXPECT_NEAR(expect(rho, a), oracle::trace_of_product(rho.matrix(), a.matrix()).real(), 1e-12);
  }
}

TEST(OperatorCore, ExpectationIsLinearInObservable) {
  Rng rng(2);
  const DensityState rho = random_density(rng, 3);
  const Matrix a = random_hermitian(rng, 3), b = random_hermitian(rng, 3);
  const double s = 0.7, t = -1.3;
  EXPECT_NEAR(expect(rho, HermitianOperator(s * a + t * b)),
              s * expect(rho, HermitianOperator(a)) + t * expect(rho, HermitianOperator(b)), 1e-12);
}

TEST(OperatorCore, CauchySchwarzBound) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 2 + trial % 3;
    const DensityState rho = random_density(rng, d);
    const Matrix a = random_hermitian(rng, d);
    // |<rho, A>|^2 <= <rho, A^2>.
    const double v = expect(rho, HermitianOperator(a));
    const double v2 = expect(rho, HermitianOperator(a * a));
    EXPECT_LE(v * v, v2 + 1e-12);
  }
}

TEST(OperatorCore, MixedQubitPurity) {
  Matrix m(2, 2);
  m << 0.7, 0.0, 0.0, 0.3;
  EXPECT_NEAR(purity_degree(DensityState(m)), 0.58, 1e-12);
  EXPECT_NEAR(purity_degree(DensityState::maximally_mixed(4)), 0.25, 1e-12);
}

TEST(OperatorCore, OperatorNormAgainstJacobi) {
  const std::vector<double> diag{1.0, -3.0, 2.0};
  EXPECT_NEAR(operator_norm(HermitianOperator::diagonal(diag)), 3.0, 1e-12);
  Matrix pauli_y(2, 2);
  pauli_y << 0.0, Complex(0, -1), Complex(0, 1), 0.0;
  EXPECT_NEAR(operator_norm(HermitianOperator(pauli_y)), 1.0, 1e-12);

  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix h = random_hermitian(rng, 2 + trial % 4);
    const auto ev = oracle::hermitian_eigenvalues(h);
    const double ref = std::max(std::abs(ev.front()), std::abs(ev.back()));
    EXPECT_NEAR(operator_norm(HermitianOperator(h)), ref, 1e-10);
    const Eigen::VectorXd lib = hermitian_eigenvalues(h);
    for (std::size_t k = 0; k < ev.size(); ++k) EXPECT_NEAR(lib(static_cast<Index>(k)), ev[k], 1e-10);
  }
}

TEST(OperatorCore, ExpectationNeverExceedsNorm) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const DensityState rho = random_density(rng, 3);
    const HermitianOperator a(random_hermitian(rng, 3));
    EXPECT_LE(std::abs(expect(rho, a)), operator_norm(a) + 1e-12);
  }
}

TEST(OperatorCore, TraceDistanceOfOrthogonalPureStates) {
  Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
  e0(0) = 1.0;
  e1(1) = 1.0;
  EXPECT_NEAR(trace_distance(vector_state(e0), vector_state(e1)), 1.0, 1e-12);
  EXPECT_NEAR(trace_distance(vector_state(e0), vector_state(e0)), 0.0, 1e-12);
}

TEST(OperatorCore, QubitExcisionFailure) {
  const DensityState rho = vector_state(plus_state());
  const std::vector<double> d{1.0, 0.0};
  const HermitianOperator a = HermitianOperator::diagonal(d);
  EXPECT_NEAR(expect(rho, a), 0.5, 1e-12);
  EXPECT_FALSE(excises(Projector::identity(2), rho, a));
  const DiagonalPurityVerdict v = diagonal_algebra_purity(rho);
  EXPECT_FALSE(v.pure);
  ASSERT_EQ(v.filter.size(), 1u);
  EXPECT_EQ(v.filter[0], (std::vector<Index>{0, 1}));
  ASSERT_TRUE(v.witness_basis_index.has_value());
  EXPECT_NEAR(v.witness_expectation, 0.5, 1e-12);
}

TEST(OperatorCore, BasisStateIsDiagonallyPure) {
  Vector e1 = Vector::Zero(3);
  e1(1) = 1.0;
  const DiagonalPurityVerdict v = diagonal_algebra_purity(vector_state(e1));
  EXPECT_TRUE(v.pure);
  ASSERT_TRUE(v.excising_projector.has_value());
  EXPECT_EQ(*v.excising_projector, (std::vector<Index>{1}));
}

TEST(OperatorCore, ExcisionOfScalarMultipleOfIdentity) {
  Rng rng(4);
  const DensityState rho = random_density(rng, 3);
  const HermitianOperator a(2.5 * Matrix::Identity(3, 3));
  EXPECT_TRUE(excises(Projector::identity(3), rho, a));
}

TEST(OperatorCore, ExcisionRequiresFilterProjector) {
  Vector e0 = Vector::Zero(2);
  e0(0) = 1.0;
  const std::vector<Index> second{1};
  EXPECT_EQ(code_of([&] {
              excises(Projector::coordinate(2, second), vector_state(e0), HermitianOperator::identity(2));
            }),
            ErrorCode::kFilterViolation);
}

TEST(OperatorCore, RejectsMalformedInputs) {
  Matrix not_herm(2, 2);
  not_herm << 1.0, 1.0, 0.0, 1.0;
  EXPECT_EQ(code_of([&] { HermitianOperator{not_herm}; }), ErrorCode::kInvariantViolation);
  Matrix bad_trace = Matrix::Identity(2, 2);
  EXPECT_EQ(code_of([&] { DensityState{bad_trace}; }), ErrorCode::kInvariantViolation);
  Matrix negative(2, 2);
  negative << 1.5, 0.0, 0.0, -0.5;
  EXPECT_EQ(code_of([&] { DensityState{negative}; }), ErrorCode::kInvariantViolation);
  Vector v(2);
  v << 1.0, 1.0;
  EXPECT_EQ(code_of([&] { vector_state(v); }), ErrorCode::kNotNormalized);
  EXPECT_EQ(code_of([&] { expect(DensityState::maximally_mixed(2), HermitianOperator::identity(3)); }),
            ErrorCode::kDimensionMismatch);
}

TEST(OperatorCore, GeneralExpectationKeepsImaginaryPart) {
  Vector u(2);
  u << 1.0 / std::sqrt(2.0), Complex(0.0, 1.0 / std::sqrt(2.0));
  Matrix anti(2, 2);
  anti << 0.0, 1.0, -1.0, 0.0;
  const Complex z = expect_general(vector_state(u), anti);
  EXPECT_GT(std::abs(z.imag()), 0.5);
}

TEST(OperatorCore, HaarUnitaryIsUnitary) {
  Rng rng(9);
  for (Index d = 1; d <= 5; ++d) EXPECT_TRUE(is_unitary(random_unitary(rng, d)));
}
