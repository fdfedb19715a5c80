#include "pettis/operator_core.hpp"

#include <cmath>
#include <string>

#include "pettis/error.hpp"

namespace pettis {
namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    fail(ErrorCode::kInvariantViolation,
         std::string(what) + " must be a non-empty square matrix");
  }
}

double max_abs_entry(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs_entry(m - m.adjoint()) <= tol;
}

bool is_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) return false;
  Matrix gram = u.adjoint() * u;
  return (gram - Matrix::Identity(u.rows(), u.cols())).norm() <= tol;
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  require_square(m, "spectral input");
  if (!is_hermitian(m, tolerance::kSpectral)) {
    fail(ErrorCode::kInvariantViolation,
         "eigenvalues requested for a non-Hermitian matrix");
  }
  Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

HermitianOperator::HermitianOperator(Matrix entries) : entries_(std::move(entries)) {
  require_square(entries_, "observable");
  if (!is_hermitian(entries_, tolerance::kConstruction)) {
    fail(ErrorCode::kInvariantViolation, "observable is not Hermitian");
  }
}

HermitianOperator HermitianOperator::identity(Index dim) {
  return HermitianOperator(Matrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> values) {
  Matrix m = Matrix::Zero(static_cast<Index>(values.size()),
                          static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    m(static_cast<Index>(i), static_cast<Index>(i)) = values[i];
  }
  return HermitianOperator(std::move(m));
}

DensityState::DensityState(Matrix matrix) : matrix_(std::move(matrix)) {
  require_square(matrix_, "density matrix");
  if (!is_hermitian(matrix_, tolerance::kConstruction)) {
    fail(ErrorCode::kInvariantViolation, "density matrix is not Hermitian");
  }
  const Complex tr = matrix_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > tolerance::kConstruction) {
    fail(ErrorCode::kInvariantViolation,
         "density matrix trace is " + std::to_string(tr.real()) + ", not 1");
  }
  const double min_eig = hermitian_eigenvalues(matrix_).minCoeff();
  if (min_eig < -tolerance::kNegativeEigenvalue) {
    fail(ErrorCode::kInvariantViolation,
         "density matrix has eigenvalue " + std::to_string(min_eig));
  }
}

DensityState DensityState::maximally_mixed(Index dim) {
  return DensityState(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityState DensityState::mixture(std::span<const double> weights,
                                   std::span<const DensityState> states) {
  if (weights.size() != states.size() || states.empty()) {
    fail(ErrorCode::kInvalidArgument, "mixture needs one weight per state");
  }
  const Index dim = states.front().dim();
  Matrix acc = Matrix::Zero(dim, dim);
  double total = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].dim() != dim) {
      fail(ErrorCode::kDimensionMismatch, "mixture of states of different dimension");
    }
    if (weights[i] < 0.0) fail(ErrorCode::kInvalidArgument, "negative mixture weight");
    acc += weights[i] * states[i].matrix();
    total += weights[i];
  }
  if (std::abs(total - 1.0) > tolerance::kConstruction) {
    fail(ErrorCode::kInvalidArgument, "mixture weights do not sum to 1");
  }
  return DensityState(std::move(acc));
}

Projector::Projector(Matrix matrix) : matrix_(std::move(matrix)) {
  require_square(matrix_, "projector");
  if ((matrix_ * matrix_ - matrix_).norm() > tolerance::kProjector ||
      (matrix_ - matrix_.adjoint()).norm() > tolerance::kProjector) {
    fail(ErrorCode::kInvariantViolation, "matrix is not an orthogonal projector");
  }
}

Projector Projector::identity(Index dim) {
  return Projector(Matrix::Identity(dim, dim));
}

Projector Projector::coordinate(Index dim, std::span<const Index> basis) {
  Matrix m = Matrix::Zero(dim, dim);
  for (Index k : basis) {
    if (k < 0 || k >= dim) fail(ErrorCode::kInvalidArgument, "basis index out of range");
    m(k, k) = 1.0;
  }
  return Projector(std::move(m));
}

Complex expect_general(const DensityState& state, const Matrix& obs) {
  if (obs.rows() != state.dim() || obs.cols() != state.dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "state has dim " + std::to_string(state.dim()) + ", observable " +
             std::to_string(obs.rows()) + "x" + std::to_string(obs.cols()));
  }
  return (state.matrix() * obs).trace();
}

double expect(const DensityState& state, const HermitianOperator& obs) {
  const Complex value = expect_general(state, obs.matrix());
  if (std::abs(value.imag()) >= tolerance::kImaginary) {
    fail(ErrorCode::kNonNegligibleImaginaryPart,
         "tr(rho A) has imaginary part " + std::to_string(value.imag()));
  }
  return value.real();
}

namespace {

void require_unit(const Vector& u) {
  if (u.size() == 0) fail(ErrorCode::kNotNormalized, "empty vector");
  const double norm = u.norm();
  if (std::abs(norm - 1.0) > tolerance::kConstruction) {
    fail(ErrorCode::kNotNormalized, "vector norm is " + std::to_string(norm));
  }
}

}  // namespace

DensityState vector_state(const Vector& u) {
  require_unit(u);
  return DensityState(u * u.adjoint());
}

Projector projector_onto(const Vector& u) {
  require_unit(u);
  return Projector(u * u.adjoint());
}

double operator_norm(const HermitianOperator& obs) {
  return hermitian_eigenvalues(obs.matrix()).cwiseAbs().maxCoeff();
}

double purity_degree(const DensityState& state) {
  return (state.matrix() * state.matrix()).trace().real();
}

double trace_distance(const DensityState& a, const DensityState& b) {
  if (a.dim() != b.dim()) {
    fail(ErrorCode::kDimensionMismatch, "trace distance of states of different dimension");
  }
  return 0.5 * hermitian_eigenvalues(a.matrix() - b.matrix()).cwiseAbs().sum();
}

bool excises(const Projector& p, const DensityState& state,
             const HermitianOperator& obs, double tol) {
  if (p.dim() != state.dim() || obs.dim() != state.dim()) {
    fail(ErrorCode::kDimensionMismatch, "excision operands differ in dimension");
  }
  const Complex in_filter = expect_general(state, p.matrix());
  if (std::abs(in_filter - Complex(1.0, 0.0)) > tol) {
    fail(ErrorCode::kFilterViolation,
         "<rho, P> = " + std::to_string(in_filter.real()) + ", P is not in the filter");
  }
  const double value = expect(state, obs);
  const Matrix residual = p.matrix() * obs.matrix() * p.matrix() - value * p.matrix();
  return residual.norm() <= tol;
}

DiagonalPurityVerdict diagonal_algebra_purity(const DensityState& state) {
  const Index dim = state.dim();
  if (dim > 16) {
    fail(ErrorCode::kInvalidArgument, "diagonal purity search limited to dim <= 16");
  }
  DiagonalPurityVerdict verdict;
  const auto subset_of = [dim](unsigned mask) {
    std::vector<Index> s;
    for (Index k = 0; k < dim; ++k) {
      if (mask & (1u << k)) s.push_back(k);
    }
    return s;
  };

  std::vector<Projector> filter;
  for (unsigned mask = 1; mask < (1u << dim); ++mask) {
    auto subset = subset_of(mask);
    Projector p = Projector::coordinate(dim, subset);
    if (std::abs(expect_general(state, p.matrix()) - Complex(1.0, 0.0)) <=
        tolerance::kConstruction) {
      verdict.filter.push_back(std::move(subset));
      filter.push_back(std::move(p));
    }
  }

  // Excising every E_kk suffices: P A P is linear in A on the diagonal algebra.
  for (std::size_t f = 0; f < filter.size(); ++f) {
    bool all = true;
    for (Index k = 0; k < dim && all; ++k) {
      std::vector<double> e(static_cast<std::size_t>(dim), 0.0);
      e[static_cast<std::size_t>(k)] = 1.0;
      all = excises(filter[f], state, HermitianOperator::diagonal(e));
    }
    if (all) {
      verdict.pure = true;
      verdict.excising_projector = verdict.filter[f];
      return verdict;
    }
  }

  for (Index k = 0; k < dim; ++k) {
    std::vector<double> e(static_cast<std::size_t>(dim), 0.0);
    e[static_cast<std::size_t>(k)] = 1.0;
    const HermitianOperator basis = HermitianOperator::diagonal(e);
    bool excised = false;
    for (const auto& p : filter) {
      if (excises(p, state, basis)) {
        excised = true;
        break;
      }
    }
    if (!excised) {
      verdict.witness_basis_index = k;
      verdict.witness_expectation = expect(state, basis);
      break;
    }
  }
  return verdict;
}

}  // namespace pettis
