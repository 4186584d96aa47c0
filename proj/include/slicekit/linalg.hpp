#pragma once
// Small dense linear algebra for symmetric positive-definite systems:
// Cholesky factorization and triangular solves on row-major matrices.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace slicekit {
namespace detail {

// Lower-triangular Cholesky factor of a p x p symmetric positive-definite
// matrix (row-major). Throws when a pivot is not strictly positive.
inline std::vector<double> cholesky_lower(const std::vector<double>& a, std::size_t p) {
  std::vector<double> l(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * p + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * p + k] * l[j * p + k];
      if (i == j) {
        if (!(s > 0.0)) throw std::runtime_error("cholesky: matrix is not positive definite");
        l[i * p + i] = std::sqrt(s);
      } else {
        l[i * p + j] = s / l[j * p + j];
      }
    }
  }
  return l;
}

// Solves L z = b (forward) then L^T x = z (backward) for the lower factor L.
inline std::vector<double> chol_solve(const std::vector<double>& l, std::size_t p,
                                      std::vector<double> b) {
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l[i * p + k] * b[k];
    b[i] /= l[i * p + i];
  }
  for (std::size_t ii = p; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < p; ++k) b[ii] -= l[k * p + ii] * b[k];
    b[ii] /= l[ii * p + ii];
  }
  return b;
}

// Solves L^T x = z alone; the solution has covariance (L L^T)^{-1} when z is
// a standard normal vector.
inline std::vector<double> upper_solve(const std::vector<double>& l, std::size_t p,
                                       std::vector<double> z) {
  for (std::size_t ii = p; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < p; ++k) z[ii] -= l[k * p + ii] * z[k];
    z[ii] /= l[ii * p + ii];
  }
  return z;
}

}  // namespace detail
}  // namespace slicekit
