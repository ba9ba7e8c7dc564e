#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scalex/marginals.hpp"
#include "scalex/matrix.hpp"

namespace scalex {

// Entrywise almost-sure envelope [a_ij, b_ij] of a random matrix, with the
// aggregates a = min a_ij, b = max b_ij, d = max (b_ij - a_ij) that all the
// concentration constants are built from.
class EnsembleBounds {
 public:
  EnsembleBounds(Matrix lower, Matrix upper) : lo_(std::move(lower)), hi_(std::move(upper)) {
    if (lo_.rows() != hi_.rows() || lo_.cols() != hi_.cols())
      throw std::invalid_argument("EnsembleBounds: envelope dimension mismatch");
    a_ = lo_(0, 0);
    b_ = hi_(0, 0);
    d_ = 0.0;
    for (std::size_t i = 0; i < lo_.rows(); ++i)
      for (std::size_t j = 0; j < lo_.cols(); ++j) {
        double lo = lo_(i, j), hi = hi_(i, j);
        if (!(lo > 0.0) || !std::isfinite(hi) || hi < lo)
          throw std::invalid_argument("EnsembleBounds: need 0 < a_ij <= b_ij at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
        a_ = std::min(a_, lo);
        b_ = std::max(b_, hi);
        d_ = std::max(d_, hi - lo);
      }
  }

  // Constant-width envelope [a, b] for every entry.
  static EnsembleBounds constant(std::size_t rows, std::size_t cols, double a, double b) {
    return EnsembleBounds(Matrix(rows, cols, a), Matrix(rows, cols, b));
  }

  // Envelope of an observation model centered at base: [base_ij - h, base_ij + h].
  static EnsembleBounds around(const Matrix& base, double half_width) {
    Matrix lo = base, hi = base;
    for (std::size_t i = 0; i < base.rows(); ++i)
      for (std::size_t j = 0; j < base.cols(); ++j) {
        lo(i, j) -= half_width;
        hi(i, j) += half_width;
      }
    return EnsembleBounds(std::move(lo), std::move(hi));
  }

  const Matrix& lower() const { return lo_; }
  const Matrix& upper() const { return hi_; }
  std::size_t rows() const { return lo_.rows(); }
  std::size_t cols() const { return lo_.cols(); }
  double a() const { return a_; }
  double b() const { return b_; }
  double d() const { return d_; }
  double width(std::size_t i, std::size_t j) const { return hi_(i, j) - lo_(i, j); }

 private:
  Matrix lo_, hi_;
  double a_ = 0.0, b_ = 0.0, d_ = 0.0;
};

// Marginal-shape quantities governing the convergence rates: rho1 is the l2/l1
// ratio of the targets, rho2 the min-sum balance, rho3 the max-sum mass.
struct MarginalProfile {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double rho3 = 0.0;
  std::size_t M = 0;
  std::size_t N = 0;
};

// Concentration-of-scaling-factors report: probability floor and relative error
// bounds, with the constants C_p = sqrt(2) b d / a^2 and C_e = 1 + 2 (b/a)^(7/2).
// probability_floor is not clamped; a negative value means the bound is vacuous.
struct ConcentrationReport {
  double delta = 0.0;
  double probability_floor = 0.0;
  double row_rel_error_bound = 0.0;
  double col_rel_error_bound = 0.0;
  double c_p = 0.0;
  double c_e = 0.0;
};

// Two-sided bound (sqrt(a)/b, sqrt(b)/a) on the gauge-normalized factor ratios
// x_i / r_bar_i and y_j / c_bar_j.
inline std::pair<double, double> lemma1_bounds(const EnsembleBounds& env) {
  return {std::sqrt(env.a()) / env.b(), std::sqrt(env.b()) / env.a()};
}

inline std::pair<double, double> lemma1_bounds(double a, double b) {
  if (!(a > 0.0) || b < a) throw std::invalid_argument("lemma1_bounds: need 0 < a <= b");
  return {std::sqrt(a) / b, std::sqrt(b) / a};
}

inline MarginalProfile rho_profile(const Marginals& m) {
  MarginalProfile p;
  p.M = m.rows();
  p.N = m.cols();
  double s = m.s();
  p.rho1 = std::max(l2_norm(m.r()) / s, l2_norm(m.c()) / s);
  p.rho2 = std::max(s / (static_cast<double>(p.M) * m.min_r()),
                    s / (static_cast<double>(p.N) * m.min_c()));
  p.rho3 = std::sqrt(static_cast<double>(p.M)) * m.max_r() *
           std::sqrt(static_cast<double>(p.N)) * m.max_c() / s;
  return p;
}

namespace detail {
// Core of the Theorem-2 report in terms of the envelope aggregates. Zero
// envelope width maps the tails to 0 and the floor to 1 by continuous extension.
inline ConcentrationReport theorem2_from_aggregates(double a, double b, double d,
                                                    const Marginals& m, double delta) {
  if (!(delta > 0.0) || delta > 1.0)
    throw std::invalid_argument("theorem2_report: delta must be in (0, 1]");
  ConcentrationReport rep;
  rep.delta = delta;
  rep.c_p = std::sqrt(2.0) * (b * d / (a * a));
  rep.c_e = 1.0 + 2.0 * std::pow(b / a, 3.5);
  double s = m.s();
  double mn = static_cast<double>(m.rows());
  double nn = static_cast<double>(m.cols());
  if (rep.c_p == 0.0) {
    rep.probability_floor = 1.0;
  } else {
    double cp2 = rep.c_p * rep.c_p;
    double r2 = l2_norm(m.r());
    double c2 = l2_norm(m.c());
    rep.probability_floor = 1.0 - 2.0 * mn * std::exp(-(delta * delta * s * s) / (cp2 * c2 * c2)) -
                            2.0 * nn * std::exp(-(delta * delta * s * s) / (cp2 * r2 * r2));
  }
  rep.row_rel_error_bound = rep.c_e * delta * s / (mn * m.min_r());
  rep.col_rel_error_bound = rep.c_e * delta * s / (nn * m.min_c());
  return rep;
}
}  // namespace detail

inline ConcentrationReport theorem2_report(const EnsembleBounds& env, const Marginals& m,
                                           double delta) {
  if (env.rows() != m.rows() || env.cols() != m.cols())
    throw std::invalid_argument("theorem2_report: envelope/marginal dimension mismatch");
  return detail::theorem2_from_aggregates(env.a(), env.b(), env.d(), m, delta);
}

// Aggregate-only entry point (the report depends on the envelope only through
// a, b, d); requires 0 <= d <= b - a so some envelope realizes the aggregates.
inline ConcentrationReport theorem2_report(double a, double b, double d, const Marginals& m,
                                           double delta) {
  if (!(a > 0.0) || b < a || d < 0.0 || d > b - a)
    throw std::invalid_argument("theorem2_report: need 0 < a <= b and 0 <= d <= b - a");
  return detail::theorem2_from_aggregates(a, b, d, m, delta);
}

enum class Axis { row, col };

// Upper bound on the probability that the selected row (column) sum of
// D(x) A_tilde D(y) deviates from its target by more than relative eps:
//   2 exp(-2 eps^2 s^2 / (C^2 sum_j c_j^2 (b_ij - a_ij)^2)),   C = b / a^2
// (columns analogously with sum_i r_i^2). A zero-width row maps to 0.
inline double lemma2_tail(const EnsembleBounds& env, const Marginals& m, double eps, Axis axis,
                          std::size_t index) {
  if (env.rows() != m.rows() || env.cols() != m.cols())
    throw std::invalid_argument("lemma2_tail: envelope/marginal dimension mismatch");
  if (!(eps > 0.0)) throw std::invalid_argument("lemma2_tail: eps must be positive");
  if ((axis == Axis::row && index >= env.rows()) || (axis == Axis::col && index >= env.cols()))
    throw std::invalid_argument("lemma2_tail: index out of range");

  double cc = env.b() / (env.a() * env.a());
  double s = m.s();
  double denom = 0.0;
  if (axis == Axis::row) {
    for (std::size_t j = 0; j < env.cols(); ++j) {
      double w = env.width(index, j);
      denom += m.c()[j] * m.c()[j] * w * w;
    }
  } else {
    for (std::size_t i = 0; i < env.rows(); ++i) {
      double w = env.width(i, index);
      denom += m.r()[i] * m.r()[i] * w * w;
    }
  }
  if (denom == 0.0) return 0.0;
  return 2.0 * std::exp(-2.0 * eps * eps * s * s / (cc * cc * denom));
}

// Aggregate form of the tail bound for a constant-width envelope: global range
// [a, b], every entry of the selected row (column) with width w.
inline double lemma2_tail_uniform(double a, double b, double width, const Marginals& m, double eps,
                                  Axis axis, std::size_t index) {
  if (!(a > 0.0) || b < a || width < 0.0 || width > b - a)
    throw std::invalid_argument("lemma2_tail_uniform: need 0 < a <= b and 0 <= width <= b - a");
  if (!(eps > 0.0)) throw std::invalid_argument("lemma2_tail_uniform: eps must be positive");
  if ((axis == Axis::row && index >= m.rows()) || (axis == Axis::col && index >= m.cols()))
    throw std::invalid_argument("lemma2_tail_uniform: index out of range");
  double cc = b / (a * a);
  double s = m.s();
  double denom = 0.0;
  const std::vector<double>& targets = (axis == Axis::row) ? m.c() : m.r();
  for (double t : targets) denom += t * t * width * width;
  if (denom == 0.0) return 0.0;
  return 2.0 * std::exp(-2.0 * eps * eps * s * s / (cc * cc * denom));
}

// Stability of the factors under approximate scaling:
//   eps/(1-eps) + 4 eps s sqrt(b) / (a^2 C1^(3/2) C2^(3/2) M min_i r_i)
// and the analogous column bound with N min_j c_j. C1 and C2 are the caller's
// lower bounds on x_i / r_bar_i and y_j / c_bar_j for the reference pair.
inline std::pair<double, double> lemma3_bound(double eps, double env_a, double env_b, double s,
                                              std::size_t M, double min_r, std::size_t N,
                                              double min_c, double c1, double c2) {
  if (!(eps > 0.0) || eps >= 1.0)
    throw std::invalid_argument("lemma3_bound: eps must be in (0, 1)");
  if (!(env_a > 0.0) || env_b < env_a || !(s > 0.0) || !(min_r > 0.0) || !(min_c > 0.0) ||
      !(c1 > 0.0) || !(c2 > 0.0))
    throw std::invalid_argument("lemma3_bound: scale parameters must be positive");
  double common = 4.0 * eps * s * std::sqrt(env_b) /
                  (env_a * env_a * std::pow(c1, 1.5) * std::pow(c2, 1.5));
  double base = eps / (1.0 - eps);
  return {base + common / (static_cast<double>(M) * min_r),
          base + common / (static_cast<double>(N) * min_c)};
}

// Discrepancy E between two factor pairs: the worst entrywise relative error
//   max { max_i |x~_i - x_i| / x_i , max_j |y~_j - y_j| / y_j }.
// Gauge-sensitive by design; callers normalize both pairs to ||x||_1 = ||y||_1
// first (the solver already returns that gauge).
inline double error_measure(std::span<const double> x_tilde, std::span<const double> y_tilde,
                            std::span<const double> x, std::span<const double> y) {
  if (x_tilde.size() != x.size() || y_tilde.size() != y.size())
    throw std::invalid_argument("error_measure: length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(x_tilde[i] > 0.0))
      throw std::invalid_argument("error_measure: non-positive row factor at index " +
                                  std::to_string(i));
    worst = std::max(worst, std::abs(x_tilde[i] - x[i]) / x[i]);
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (!(y[j] > 0.0) || !(y_tilde[j] > 0.0))
      throw std::invalid_argument("error_measure: non-positive column factor at index " +
                                  std::to_string(j));
    worst = std::max(worst, std::abs(y_tilde[j] - y[j]) / y[j]);
  }
  return worst;
}

}  // namespace scalex
