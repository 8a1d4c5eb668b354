#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace specmix::detail {

// Cholesky solve of A x = b for symmetric positive definite A (row-major
// n x n). Returns false when a pivot falls below rel_tol times the largest
// diagonal entry, which callers treat as "numerically singular".
inline bool spd_solve(std::vector<double> a, std::size_t n, std::vector<double> b,
                      std::vector<double>& x, double rel_tol = 1e-13) {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a[i * n + i]));
  const double floor = rel_tol * (max_diag > 0.0 ? max_diag : 1.0);

  // In-place lower Cholesky factor.
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > floor)) return false;
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
  }
  // Forward then back substitution.
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  x.assign(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= a[k * n + ii] * x[k];
    x[ii] = s / a[ii * n + ii];
  }
  return true;
}

}  // namespace specmix::detail
