#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "pathlp/vector_ops.hpp"

namespace pathlp {

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return entries_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  const double* row_data(std::size_t i) const { return &entries_[i * cols_]; }
  double* row_data(std::size_t i) { return &entries_[i * cols_]; }

  const std::vector<double>& entries() const { return entries_; }

  bool all_finite() const { return pathlp::all_finite(entries_); }

  double max_abs() const {
    double m = 0.0;
    for (double v : entries_) m = std::max(m, std::fabs(v));
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

inline Vector matvec(const DenseMatrix& m, const Vector& x) {
  Vector out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row_data(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
  return out;
}

// m^T y
inline Vector matvec_transpose(const DenseMatrix& m, const Vector& y) {
  Vector out(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row_data(i);
    const double yi = y[i];
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += row[j] * yi;
  }
  return out;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row_data(k);
      double* orow = out.row_data(i);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

// A Diag(w) A^T, the weighted normal matrix. Only this product ever needs to
// be positive definite, so it is assembled symmetrically.
inline DenseMatrix weighted_normal_matrix(const DenseMatrix& a,
                                          const Vector& w) {
  const std::size_t d = a.rows();
  const std::size_t n = a.cols();
  DenseMatrix q(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const double* rowi = a.row_data(i);
    for (std::size_t j = i; j < d; ++j) {
      const double* rowj = a.row_data(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += rowi[k] * w[k] * rowj[k];
      q(i, j) = acc;
      q(j, i) = acc;
    }
  }
  return q;
}

inline double frobenius_norm(const DenseMatrix& m) {
  double acc = 0.0;
  for (double v : m.entries()) acc += v * v;
  return std::sqrt(acc);
}

}  // namespace pathlp
