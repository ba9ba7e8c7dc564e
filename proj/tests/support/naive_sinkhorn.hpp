#pragma once

// Test-only scaling oracle: literal alternating normalization of matrix copies
// (divide each row by its sum times the target, then each column), run for a
// fixed large iteration count with no factor bookkeeping. Independent of the
// factor-based solver it cross-checks.

#include <cstddef>

#include "scalex/marginals.hpp"
#include "scalex/matrix.hpp"

namespace scalex::testing {

inline Matrix naive_alternating_scaling(Matrix a, const Marginals& m, std::size_t iterations) {
  for (std::size_t k = 0; k < iterations; ++k) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < a.cols(); ++j) sum += a(i, j);
      for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) *= m.r()[i] / sum;
    }
    for (std::size_t j = 0; j < a.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) sum += a(i, j);
      for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) *= m.c()[j] / sum;
    }
  }
  return a;
}

}  // namespace scalex::testing
