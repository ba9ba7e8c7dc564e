#pragma once

// Test-only singular value oracle: one-sided Jacobi orthogonalization of the
// columns. Deliberately independent of the power-iteration and Lanczos paths
// it cross-checks. Intended for small matrices (tests use up to 64x64).

#include <cmath>
#include <vector>

#include "scalex/matrix.hpp"

namespace scalex::testing {

inline std::vector<double> jacobi_singular_values(Matrix a) {
  if (a.rows() < a.cols()) a = a.transposed();
  const std::size_t m = a.rows(), n = a.cols();

  auto col_dot = [&](std::size_t p, std::size_t q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += a(i, p) * a(i, q);
    return acc;
  };

  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = col_dot(p, p), aqq = col_dot(q, q), apq = col_dot(p, q);
        off = std::max(off, std::abs(apq) / std::sqrt(std::max(app * aqq, 1e-300)));
        if (apq == 0.0) continue;
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          double vp = a(i, p), vq = a(i, q);
          a(i, p) = c * vp - s * vq;
          a(i, q) = s * vp + c * vq;
        }
      }
    if (off < 1e-14) break;
  }

  std::vector<double> sigma(n);
  for (std::size_t p = 0; p < n; ++p) sigma[p] = std::sqrt(col_dot(p, p));
  std::sort(sigma.begin(), sigma.end(), std::greater<double>());
  return sigma;
}

inline double jacobi_largest_singular_value(const Matrix& a) {
  return jacobi_singular_values(a)[0];
}

}  // namespace scalex::testing
