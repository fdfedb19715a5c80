#include "pettis/random.hpp"

#include <cmath>

namespace pettis {
namespace {

Matrix gaussian_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return m;
}

}  // namespace

Vector random_unit_vector(Rng& rng, Index dim) {
  Vector v = gaussian_matrix(rng, dim, 1).col(0);
  v /= v.norm();
  return v;
}

Matrix random_unitary(Rng& rng, Index dim) {
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(rng, dim, dim));
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

Matrix random_hermitian(Rng& rng, Index dim) {
  Matrix g = gaussian_matrix(rng, dim, dim);
  return 0.5 * (g + g.adjoint());
}

DensityState random_density(Rng& rng, Index dim) {
  Matrix g = gaussian_matrix(rng, dim, dim);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityState(std::move(rho));
}

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = expo(rng);
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace pettis
