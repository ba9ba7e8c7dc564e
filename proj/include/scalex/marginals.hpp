#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scalex/matrix.hpp"

namespace scalex {

// Prescribed row sums r and column sums c with equal l1 mass s, plus the derived
// normalized targets r_bar_i = r_i / sqrt(s) and c_bar_j = c_j / sqrt(s) that the
// factor bounds are stated against.
class Marginals {
 public:
  // Relative mismatch between ||r||_1 and ||c||_1 accepted before rejecting the
  // input; within it, s is symmetrized to the mean of the two norms.
  static constexpr double kConsistencyTol = 1e-8;

  Marginals(std::vector<double> row_sums, std::vector<double> col_sums)
      : r_(std::move(row_sums)), c_(std::move(col_sums)) {
    if (r_.empty() || c_.empty()) throw std::invalid_argument("Marginals: empty target vector");
    for (std::size_t i = 0; i < r_.size(); ++i)
      if (!(r_[i] > 0.0) || !std::isfinite(r_[i]))
        throw std::invalid_argument("Marginals: row sum " + std::to_string(i) +
                                    " must be positive and finite");
    for (std::size_t j = 0; j < c_.size(); ++j)
      if (!(c_[j] > 0.0) || !std::isfinite(c_[j]))
        throw std::invalid_argument("Marginals: column sum " + std::to_string(j) +
                                    " must be positive and finite");
    double sr = l1_norm(r_);
    double sc = l1_norm(c_);
    if (std::abs(sr - sc) > kConsistencyTol * std::max(sr, sc))
      throw std::invalid_argument("Marginals: ||r||_1 = " + std::to_string(sr) +
                                  " and ||c||_1 = " + std::to_string(sc) +
                                  " differ beyond tolerance");
    s_ = 0.5 * (sr + sc);
    double root_s = std::sqrt(s_);
    r_bar_.resize(r_.size());
    c_bar_.resize(c_.size());
    for (std::size_t i = 0; i < r_.size(); ++i) r_bar_[i] = r_[i] / root_s;
    for (std::size_t j = 0; j < c_.size(); ++j) c_bar_[j] = c_[j] / root_s;
  }

  static Marginals uniform(std::size_t m, std::size_t n, double row_value = 1.0,
                           double col_value = 1.0) {
    return Marginals(std::vector<double>(m, row_value), std::vector<double>(n, col_value));
  }

  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& c() const { return c_; }
  const std::vector<double>& r_bar() const { return r_bar_; }
  const std::vector<double>& c_bar() const { return c_bar_; }
  double s() const { return s_; }
  std::size_t rows() const { return r_.size(); }
  std::size_t cols() const { return c_.size(); }

  double min_r() const {
    double m = r_[0];
    for (double v : r_) m = std::min(m, v);
    return m;
  }
  double max_r() const {
    double m = r_[0];
    for (double v : r_) m = std::max(m, v);
    return m;
  }
  double min_c() const {
    double m = c_[0];
    for (double v : c_) m = std::min(m, v);
    return m;
  }
  double max_c() const {
    double m = c_[0];
    for (double v : c_) m = std::max(m, v);
    return m;
  }

 private:
  std::vector<double> r_, c_, r_bar_, c_bar_;
  double s_ = 0.0;
};

}  // namespace scalex
