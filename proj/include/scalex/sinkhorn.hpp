#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "scalex/marginals.hpp"
#include "scalex/matrix.hpp"

namespace scalex {

inline constexpr double kDefaultSolverTol = 1e-12;
inline constexpr std::size_t kDefaultMaxIters = 1'000'000;

// Row/column factors of a scaling, plus convergence diagnostics. The pair is in
// the canonical gauge ||x||_1 = ||y||_1.
struct SinkhornFactors {
  std::vector<double> x;
  std::vector<double> y;
  std::size_t iterations = 0;
  double final_margin_error = 0.0;
  bool converged = false;
};

// Factors together with the scaled matrix P = D(x) A D(y).
struct ScalingSolution {
  std::vector<double> x;
  std::vector<double> y;
  Matrix scaled;
  std::size_t iterations = 0;
  double final_margin_error = 0.0;
  bool converged = false;
};

namespace detail {
inline void check_positive_vector(std::span<const double> v, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] > 0.0) || !std::isfinite(v[i]))
      throw std::invalid_argument(std::string(name) + ": non-positive entry at index " +
                                  std::to_string(i));
}
}  // namespace detail

// Rescales (x, y) to (alpha x, y / alpha) with alpha = sqrt(||y||_1 / ||x||_1),
// the unique gauge with ||x||_1 = ||y||_1. Leaves every product x_i y_j unchanged.
inline std::pair<std::vector<double>, std::vector<double>> normalize_gauge(
    std::vector<double> x, std::vector<double> y) {
  detail::check_positive_vector(x, "normalize_gauge: x");
  detail::check_positive_vector(y, "normalize_gauge: y");
  double alpha = std::sqrt(l1_norm(y) / l1_norm(x));
  for (double& v : x) v *= alpha;
  for (double& v : y) v /= alpha;
  return {std::move(x), std::move(y)};
}

// Max absolute deviation of the row and column sums of P from the targets.
// Zero iff P is exactly scaled.
inline double margin_residual(const Matrix& p, const Marginals& m) {
  if (p.rows() != m.rows() || p.cols() != m.cols())
    throw std::invalid_argument("margin_residual: dimension mismatch");
  double worst = 0.0;
  std::vector<NeumaierSum> col_acc(p.cols());
  for (std::size_t i = 0; i < p.rows(); ++i) {
    auto row = p.row(i);
    NeumaierSum row_acc;
    for (std::size_t j = 0; j < p.cols(); ++j) {
      row_acc.add(row[j]);
      col_acc[j].add(row[j]);
    }
    worst = std::max(worst, std::abs(row_acc.value() - m.r()[i]));
  }
  for (std::size_t j = 0; j < p.cols(); ++j)
    worst = std::max(worst, std::abs(col_acc[j].value() - m.c()[j]));
  return worst;
}

namespace detail {

// Residual of the pair (x, y): replays the exact rounding of the materialized
// P_ij = (x_i * A_ij) * y_j, so a converged result also satisfies
// margin_residual(scaled, m) <= tol bit-for-bit.
inline double scaling_residual(const Matrix& a, std::span<const double> x,
                               std::span<const double> y, const Marginals& m) {
  double worst = 0.0;
  std::vector<NeumaierSum> col_acc(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    double xi = x[i];
    NeumaierSum row_acc;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      double p = (xi * row[j]) * y[j];
      row_acc.add(p);
      col_acc[j].add(p);
    }
    worst = std::max(worst, std::abs(row_acc.value() - m.r()[i]));
  }
  for (std::size_t j = 0; j < a.cols(); ++j)
    worst = std::max(worst, std::abs(col_acc[j].value() - m.c()[j]));
  return worst;
}

}  // namespace detail

// Sinkhorn-Knopp (RAS) iteration. One full iteration normalizes the rows to r and
// then the columns to c; the margin residual is measured after the column step.
// Exhausting max_iters is reported through converged = false, not an error.
// initial_y overrides the all-ones starting column factors (used by the
// uniqueness tests; the scaled matrix does not depend on the start).
inline SinkhornFactors sinkhorn_factors(const PositiveMatrix& a, const Marginals& m, double tol,
                                        std::size_t max_iters,
                                        std::vector<double> initial_y = {}) {
  const Matrix& mat = a.matrix();
  const std::size_t rows = mat.rows(), cols = mat.cols();
  if (rows != m.rows() || cols != m.cols())
    throw std::invalid_argument("sinkhorn_factors: matrix/marginal dimension mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("sinkhorn_factors: tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("sinkhorn_factors: max_iters must be >= 1");

  std::vector<double> y;
  if (initial_y.empty()) {
    y.assign(cols, 1.0);
  } else {
    if (initial_y.size() != cols)
      throw std::invalid_argument("sinkhorn_factors: initial_y length mismatch");
    detail::check_positive_vector(initial_y, "sinkhorn_factors: initial_y");
    y = std::move(initial_y);
  }

  SinkhornFactors out;
  out.x.assign(rows, 1.0);
  std::vector<double> t(rows), u(cols);
  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    matvec(mat, y, t);
    for (std::size_t i = 0; i < rows; ++i) out.x[i] = m.r()[i] / t[i];
    matvec_transpose(mat, out.x, u);
    for (std::size_t j = 0; j < cols; ++j) y[j] = m.c()[j] / u[j];

    // The iteration is gauge-covariant, so the residual can be measured on the
    // canonical-gauge pair — the pair that is actually returned. That keeps
    // final_margin_error bit-identical to margin_residual of the scaled matrix.
    std::tie(out.x, y) = normalize_gauge(std::move(out.x), std::move(y));

    out.iterations = iter;
    out.final_margin_error = detail::scaling_residual(mat, out.x, y, m);
    if (out.final_margin_error <= tol) {
      out.converged = true;
      break;
    }
  }
  out.y = std::move(y);
  return out;
}

inline ScalingSolution sinkhorn_knopp(const PositiveMatrix& a, const Marginals& m,
                                      double tol = kDefaultSolverTol,
                                      std::size_t max_iters = kDefaultMaxIters,
                                      std::vector<double> initial_y = {}) {
  SinkhornFactors f = sinkhorn_factors(a, m, tol, max_iters, std::move(initial_y));
  ScalingSolution sol;
  sol.scaled = scaled_copy(a.matrix(), f.x, f.y);
  sol.x = std::move(f.x);
  sol.y = std::move(f.y);
  sol.iterations = f.iterations;
  sol.final_margin_error = f.final_margin_error;
  sol.converged = f.converged;
  return sol;
}

}  // namespace scalex
