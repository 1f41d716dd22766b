#pragma once

#include <random>

#include <Eigen/Dense>

#include "csflow/dynamics.hpp"

namespace csflow {

using Rng = std::mt19937_64;

// Real and imaginary parts uniform in [-scale, scale].
cplx random_complex(Rng& rng, double scale = 1.0);
Eigen::MatrixXcd random_matrix(int rows, int cols, Rng& rng, double scale = 1.0);
Eigen::MatrixXcd random_hermitian(int n, Rng& rng, double scale = 1.0);

RiccatiBlocks random_blocks(int m, int n, RiccatiVariant v, Rng& rng, double scale = 1.0);

// Hermitian eps over the generators of a representation: eps(X^dagger) = conj eps(X).
LinearHamiltonian random_hamiltonian(const Representation& rep, Rng& rng, double scale = 1.0);

// Point with independent components of modulus below radius.
CVec random_point(int dim, Rng& rng, double radius);

} // namespace csflow
