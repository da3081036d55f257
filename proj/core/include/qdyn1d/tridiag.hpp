#pragma once

#include <vector>

#include "qdyn1d/errors.hpp"

namespace qdyn1d {

/// Full eigendecomposition of a symmetric tridiagonal matrix (diag d,
/// off-diagonal e). Eigenvalues ascending; eigenvectors orthonormal, stored
/// column-major in z (n x n). Backed by LAPACK's divide-and-conquer solver.
void tridiag_eigensystem(std::vector<double> d, std::vector<double> e,
                         std::vector<double>& eigenvalues, std::vector<double>& z);

/// Eigenvalues only (LAPACK dsterf), ascending.
std::vector<double> tridiag_eigenvalues(std::vector<double> d, std::vector<double> e);

}  // namespace qdyn1d
