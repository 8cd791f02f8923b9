#pragma once

#include "npsr/matrix.hpp"

namespace npsr::linalg {

/// Lower Cholesky factor of a symmetric positive-definite matrix (only the
/// lower triangle of `a` is read). Throws SingularSystem when a pivot is not
/// safely positive.
Matrix cholesky(const Matrix& a);

/// Solves L L^T X = B for every column of B.
Matrix cholesky_solve(const Matrix& lower, const Matrix& rhs);

/// A * B for dense matrices.
Matrix multiply(const Matrix& a, const Matrix& b);

}  // namespace npsr::linalg
