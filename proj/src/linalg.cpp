#include "npsr/linalg.hpp"

#include <cmath>
#include <string>

#include "npsr/error.hpp"
#include "npsr/simd/kernels.hpp"

namespace npsr::linalg {

Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("cholesky: matrix is not square");
  const std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double tol = max_diag * 1e-14 * static_cast<double>(n);

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto lj = l.row(j).first(j);
    const double pivot = a(j, j) - simd::dot(lj, lj);
    if (!(pivot > tol)) throw SingularSystem("non-positive pivot at index " + std::to_string(j));
    const double root = std::sqrt(pivot);
    l(j, j) = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - simd::dot(l.row(i).first(j), lj)) / root;
    }
  }
  return l;
}

Matrix cholesky_solve(const Matrix& lower, const Matrix& rhs) {
  const std::size_t n = lower.rows();
  if (rhs.rows() != n) throw ShapeError("cholesky_solve: rhs row count mismatch");
  Matrix y = rhs;
  for (std::size_t i = 0; i < n; ++i) {
    auto yi = y.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      if (lower(i, k) != 0.0) simd::axpy(-lower(i, k), y.row(k), yi);
    }
    for (double& v : yi) v /= lower(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    auto xi = y.row(ii);
    for (std::size_t k = ii + 1; k < n; ++k) {
      if (lower(k, ii) != 0.0) simd::axpy(-lower(k, ii), y.row(k), xi);
    }
    for (double& v : xi) v /= lower(ii, ii);
  }
  return y;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("multiply: inner dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto oi = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) != 0.0) simd::axpy(a(i, k), b.row(k), oi);
    }
  }
  return out;
}

}  // namespace npsr::linalg
