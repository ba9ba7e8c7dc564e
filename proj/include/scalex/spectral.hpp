#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "scalex/matrix.hpp"
#include "scalex/rng.hpp"

namespace scalex {

namespace detail {

// Fixed seed for the deterministic start vectors of the iterative norm estimators.
inline constexpr std::uint64_t kSpectralSeed = 0x5ca1ab1e;

inline std::vector<double> seeded_unit_vector(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> v(n);
  for (double& e : v) e = rng.next_uniform(-1.0, 1.0);
  double norm = l2_norm(v);
  for (double& e : v) e /= norm;
  return v;
}

// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal d and
// off-diagonal e, by bisection on the Sturm (LDL^T inertia) count.
inline double tridiag_max_eigenvalue(const std::vector<double>& d, const std::vector<double>& e) {
  const std::size_t n = d.size();
  double hi = 0.0, lo = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double off = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
    hi = std::max(hi, d[i] + off);
    lo = std::min(lo, d[i] - off);
  }
  auto count_below = [&](double x) {
    std::size_t count = 0;
    double q = d[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
      double denom = (q == 0.0) ? 1e-300 : q;
      q = d[i] - x - e[i - 1] * e[i - 1] / denom;
      if (q < 0.0) ++count;
    }
    return count;
  };
  for (int step = 0; step < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++step) {
    double mid = 0.5 * (lo + hi);
    if (count_below(mid) == n)
      hi = mid;  // all eigenvalues below mid
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Largest singular value by power iteration on P^T P, with a deterministic
// seeded start vector and termination on relative stagnation of the Rayleigh
// quotient. Suited to matrices with a clear spectral gap (scaled matrices are
// near rank-one); see largest_singular_value for flat-edge spectra.
inline double operator_norm(const Matrix& p, double tol = 1e-10) {
  if (!(tol > 0.0)) throw std::invalid_argument("operator_norm: tol must be positive");
  if (!p.all_finite()) throw std::invalid_argument("operator_norm: non-finite entry");

  std::vector<double> v = detail::seeded_unit_vector(p.cols(), detail::kSpectralSeed);
  std::vector<double> w(p.rows()), z(p.cols());
  double lambda_prev = -1.0;
  constexpr std::size_t kMaxSteps = 100'000;
  for (std::size_t step = 0; step < kMaxSteps; ++step) {
    matvec(p, v, w);
    double lambda = dot(w, w);  // Rayleigh quotient of P^T P at the unit vector v
    if (lambda == 0.0) return 0.0;
    matvec_transpose(p, w, z);
    double zn = l2_norm(z);
    if (zn == 0.0) return std::sqrt(lambda);
    for (std::size_t j = 0; j < z.size(); ++j) v[j] = z[j] / zn;
    if (lambda_prev >= 0.0 && std::abs(lambda - lambda_prev) <= tol * lambda)
      return std::sqrt(lambda);
    lambda_prev = lambda;
  }
  return std::sqrt(lambda_prev);
}

// Largest singular value by Golub-Kahan-Lanczos bidiagonalization with full
// reorthogonalization. Converges in O(1/sqrt(gap)) iterations where power
// iteration needs O(1/gap), which is what makes the experiment-scale
// ||P_tilde - P||_2 measurements affordable: those difference matrices have a
// Marchenko-Pastur-type edge with gap O(N^(-2/3)). Ritz values increase
// monotonically, so stagnation over a few consecutive steps means convergence.
inline double largest_singular_value(const Matrix& p, double tol = 1e-9,
                                     std::size_t max_dim = 400) {
  if (!(tol > 0.0)) throw std::invalid_argument("largest_singular_value: tol must be positive");
  if (!p.all_finite()) throw std::invalid_argument("largest_singular_value: non-finite entry");

  const std::size_t rows = p.rows(), cols = p.cols();
  const std::size_t dim_cap = std::min({max_dim, rows, cols});

  std::vector<std::vector<double>> us, vs;
  std::vector<double> alphas, betas;
  vs.push_back(detail::seeded_unit_vector(cols, detail::kSpectralSeed ^ 0x6b1d));

  std::vector<double> u(rows), v(cols);
  matvec(p, vs.back(), u);
  double alpha = l2_norm(u);
  if (alpha == 0.0) return 0.0;
  for (double& e : u) e /= alpha;
  us.push_back(u);
  alphas.push_back(alpha);

  auto reorthogonalize = [](std::vector<double>& w, const std::vector<std::vector<double>>& basis) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) {
        double proj = dot(w, q);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= proj * q[i];
      }
  };

  double sigma = alphas[0];
  std::size_t stagnant = 0;
  while (vs.size() < dim_cap) {
    // v_{k+1} from P^T u_k
    matvec_transpose(p, us.back(), v);
    for (std::size_t j = 0; j < cols; ++j) v[j] -= alphas.back() * vs.back()[j];
    reorthogonalize(v, vs);
    double beta = l2_norm(v);
    if (beta <= 1e-14 * alphas[0]) break;  // invariant subspace: sigma is exact
    for (double& e : v) e /= beta;
    vs.push_back(v);
    betas.push_back(beta);

    matvec(p, vs.back(), u);
    for (std::size_t i = 0; i < rows; ++i) u[i] -= beta * us.back()[i];
    reorthogonalize(u, us);
    alpha = l2_norm(u);
    if (alpha <= 1e-14 * alphas[0]) break;
    for (double& e : u) e /= alpha;
    us.push_back(u);
    alphas.push_back(alpha);

    // sigma_max of the bidiagonal projection B (alpha_i diagonal, beta_i next
    // to it) via the tridiagonal Gram matrix of its rows, B B^T.
    const std::size_t k = alphas.size();
    std::vector<double> d(k), e(k - 1);
    for (std::size_t i = 0; i < k; ++i) {
      d[i] = alphas[i] * alphas[i] + (i + 1 < k ? betas[i] * betas[i] : 0.0);
      if (i + 1 < k) e[i] = betas[i] * alphas[i + 1];
    }
    double next = std::sqrt(detail::tridiag_max_eigenvalue(d, e));
    stagnant = (next - sigma <= tol * next) ? stagnant + 1 : 0;
    sigma = next;
    if (stagnant >= 3) break;
  }
  return sigma;
}

}  // namespace scalex
