#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scalex {

// Dense row-major matrix of doubles. Plain value type; all the structure
// (positivity, envelopes, ...) lives in wrapper types that validate on construction.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("Matrix: dimensions must be >= 1");
  }
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("Matrix: dimensions must be >= 1");
    if (data_.size() != rows * cols) throw std::invalid_argument("Matrix: data size mismatch");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Neumaier-compensated sum. Row/column sums feed a 1e-12 termination test, so the
// plain left-to-right error bound (n*eps*sum) is not good enough at experiment sizes.
class NeumaierSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> values) {
  NeumaierSum s;
  for (double v : values) s.add(v);
  return s.value();
}

// Strictly positive, finite matrix — the only thing the scaling solver accepts.
// Validates once on construction and names the offending entry on failure.
class PositiveMatrix {
 public:
  explicit PositiveMatrix(Matrix m) : m_(std::move(m)) {
    for (std::size_t i = 0; i < m_.rows(); ++i)
      for (std::size_t j = 0; j < m_.cols(); ++j) {
        double v = m_(i, j);
        if (!std::isfinite(v))
          throw std::invalid_argument("PositiveMatrix: non-finite entry at (" + std::to_string(i) +
                                      "," + std::to_string(j) + ")");
        if (v <= 0.0)
          throw std::invalid_argument("PositiveMatrix: non-positive entry at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
      }
  }

  std::size_t rows() const { return m_.rows(); }
  std::size_t cols() const { return m_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }
  operator const Matrix&() const { return m_; }

  double min_entry() const {
    double m = m_(0, 0);
    for (double v : m_.data()) m = std::min(m, v);
    return m;
  }
  double max_entry() const {
    double m = m_(0, 0);
    for (double v : m_.data()) m = std::max(m, v);
    return m;
  }

 private:
  Matrix m_;
};

// y = A v
inline void matvec(const Matrix& a, std::span<const double> v, std::span<double> out) {
  if (v.size() != a.cols() || out.size() != a.rows())
    throw std::invalid_argument("matvec: dimension mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
}

// y = A^T v, accumulated row-wise to keep the access pattern contiguous.
inline void matvec_transpose(const Matrix& a, std::span<const double> v, std::span<double> out) {
  if (v.size() != a.rows() || out.size() != a.cols())
    throw std::invalid_argument("matvec_transpose: dimension mismatch");
  for (std::size_t j = 0; j < a.cols(); ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    double vi = v[i];
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += vi * row[j];
  }
}

// Overwrites A with D(x) A D(y). Product order is fixed as (x_i * A_ij) * y_j;
// margin measurements elsewhere replay exactly this rounding.
inline void scale_in_place(Matrix& a, std::span<const double> x, std::span<const double> y) {
  if (x.size() != a.rows() || y.size() != a.cols())
    throw std::invalid_argument("scale_in_place: dimension mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    double xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) row[j] = (xi * row[j]) * y[j];
  }
}

inline Matrix scaled_copy(const Matrix& a, std::span<const double> x, std::span<const double> y) {
  Matrix p = a;
  scale_in_place(p, x, y);
  return p;
}

inline std::vector<double> row_sums(const Matrix& a) {
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = compensated_sum(a.row(i));
  return out;
}

inline std::vector<double> col_sums(const Matrix& a) {
  std::vector<NeumaierSum> acc(a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) acc[j].add(row[j]);
  }
  std::vector<double> out(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) out[j] = acc[j].value();
  return out;
}

inline double l1_norm(std::span<const double> v) {
  NeumaierSum s;
  for (double x : v) s.add(std::abs(x));
  return s.value();
}

inline double l2_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace scalex
