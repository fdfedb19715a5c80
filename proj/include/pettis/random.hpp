#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pettis/operator_core.hpp"

namespace pettis {

using Rng = std::mt19937_64;

Vector random_unit_vector(Rng& rng, Index dim);
// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
// of R's diagonal folded back into Q.
Matrix random_unitary(Rng& rng, Index dim);
Matrix random_hermitian(Rng& rng, Index dim);
DensityState random_density(Rng& rng, Index dim);
// Uniform point on the probability simplex with n vertices.
std::vector<double> random_simplex(Rng& rng, std::size_t n);

}  // namespace pettis
