#pragma once

// Dense complex linear algebra on finite-dimensional Hilbert spaces.
//
// Inner products are linear in the second argument: (u, v) = u^† v.

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pettis {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

namespace tolerance {
inline constexpr double kConstruction = 1e-12;
inline constexpr double kSpectral = 1e-10;
inline constexpr double kProjector = 1e-10;
inline constexpr double kImaginary = 1e-10;
inline constexpr double kUnitary = 1e-10;
inline constexpr double kNegativeEigenvalue = 1e-10;
}  // namespace tolerance

bool is_hermitian(const Matrix& m, double tol = tolerance::kConstruction);
bool is_unitary(const Matrix& u, double tol = tolerance::kUnitary);

// Real spectrum of a Hermitian matrix in ascending order. Non-Hermitian input
// is rejected with kInvariantViolation.
Eigen::VectorXd hermitian_eigenvalues(const Matrix& m);

class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix entries);

  static HermitianOperator identity(Index dim);
  static HermitianOperator diagonal(std::span<const double> values);

  Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }

 private:
  Matrix entries_;
};

class DensityState {
 public:
  explicit DensityState(Matrix matrix);

  static DensityState maximally_mixed(Index dim);
  // Convex combination; weights must be nonnegative and sum to one.
  static DensityState mixture(std::span<const double> weights,
                              std::span<const DensityState> states);

  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }

 private:
  Matrix matrix_;
};

class Projector {
 public:
  explicit Projector(Matrix matrix);

  static Projector identity(Index dim);
  // Orthogonal projector onto the span of the listed basis vectors.
  static Projector coordinate(Index dim, std::span<const Index> basis);

  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  Vector apply(const Vector& v) const { return matrix_ * v; }

 private:
  Matrix matrix_;
};

// <rho, A> = Re tr(rho A); the imaginary part must vanish to 1e-10.
double expect(const DensityState& state, const HermitianOperator& obs);
// tr(rho A) for an arbitrary square matrix A.
Complex expect_general(const DensityState& state, const Matrix& obs);

DensityState vector_state(const Vector& u);
Projector projector_onto(const Vector& u);

double operator_norm(const HermitianOperator& obs);
double purity_degree(const DensityState& state);
double trace_distance(const DensityState& a, const DensityState& b);

// P A P == <rho, A> P within tol (Frobenius). The projector has to lie in the
// quantum filter of rho, i.e. <rho, P> = 1, otherwise kFilterViolation.
bool excises(const Projector& p, const DensityState& state,
             const HermitianOperator& obs, double tol = tolerance::kConstruction);

// Purity of a state restricted to the algebra of diagonal matrices, decided by
// exhaustive excision over the 2^dim diagonal projectors.
struct DiagonalPurityVerdict {
  bool pure = false;
  // Indices of the diagonal projectors (as coordinate subsets) in the filter.
  std::vector<std::vector<Index>> filter;
  // When pure: a filter projector excising every diagonal observable.
  std::optional<std::vector<Index>> excising_projector;
  // When not pure: a basis observable E_kk no filter projector excises.
  std::optional<Index> witness_basis_index;
  double witness_expectation = 0.0;
};

DiagonalPurityVerdict diagonal_algebra_purity(const DensityState& state);

}  // namespace pettis
