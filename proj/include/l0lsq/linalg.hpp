#pragma once

// Dense real linear algebra for desk-scale matrices (rows, cols <= 64 or so).
// Factorization-based throughout, no randomization: results are reproducible
// bit-for-bit on a given platform.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "l0lsq/errors.hpp"

namespace l0lsq {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t len, double fill = 0.0) : data_(len, fill) { check_finite(); }
  Vector(std::initializer_list<double> xs) : data_(xs) { check_finite(); }
  explicit Vector(std::vector<double> xs) : data_(std::move(xs)) { check_finite(); }

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  std::span<const double> entries() const noexcept { return data_; }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }
  bool operator==(const Vector&) const = default;

 private:
  void check_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) throw InvalidInput("vector entry is not finite");
  }
  std::vector<double> data_;
};

// Row-major dense matrix. Zero columns are legal (the empty submatrix); zero
// rows are not.
class Matrix {
 public:
  Matrix() : rows_(1), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0) throw InvalidInput("matrix must have at least one row");
  }
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows == 0) throw InvalidInput("matrix must have at least one row");
    if (data_.size() != rows * cols)
      throw InvalidInput("matrix entries length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    for (double x : data_)
      if (!std::isfinite(x)) throw InvalidInput("matrix entry is not finite");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  std::span<const double> entries() const noexcept { return data_; }
  bool operator==(const Matrix&) const = default;

  Vector column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

namespace detail {

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Eigen::VectorXd to_eigen(const Vector& v) {
  Eigen::VectorXd e(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) e(i) = v[i];
  return e;
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j)
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  return m;
}

inline Vector from_eigen(const Eigen::VectorXd& e) {
  std::vector<double> v(e.data(), e.data() + e.size());
  return Vector(std::move(v));
}

}  // namespace detail

inline Vector mat_vec(const Matrix& m, const Vector& v) {
  if (v.size() != m.cols()) throw InvalidInput("mat_vec: dimension mismatch");
  Vector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InvalidInput("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(const Vector& v) { return dot(v, v); }
inline double norm(const Vector& v) { return std::sqrt(norm_sq(v)); }

inline double inf_norm(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline Vector sub(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InvalidInput("sub: dimension mismatch");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

// Rank from a column-pivoted Householder QR: a diagonal of R counts iff its
// magnitude exceeds rel_tol times the largest diagonal magnitude.
inline std::size_t numerical_rank(const Matrix& m, double rel_tol) {
  if (!(rel_tol > 0.0)) throw InvalidInput("numerical_rank: rel_tol must be > 0");
  if (m.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(detail::to_eigen(m));
  qr.setThreshold(rel_tol);
  return static_cast<std::size_t>(qr.rank());
}

// Unique least-squares solution for a full-column-rank system; empty result
// for a zero-column matrix.
inline Vector lstsq(const Matrix& m, const Vector& rhs, double rel_tol = 1e-10) {
  if (rhs.size() != m.rows()) throw InvalidInput("lstsq: rhs length does not match rows");
  if (m.cols() == 0) return Vector();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(detail::to_eigen(m));
  qr.setThreshold(rel_tol);
  if (static_cast<std::size_t>(qr.rank()) != m.cols())
    throw RankDeficient("lstsq: matrix is rank deficient (rank " +
                        std::to_string(qr.rank()) + " < " + std::to_string(m.cols()) + ")");
  return detail::from_eigen(Eigen::VectorXd(qr.solve(detail::to_eigen(rhs))));
}

// Minimum-norm least-squares solution; defined for any rank.
inline Vector lstsq_min_norm(const Matrix& m, const Vector& rhs, double rel_tol = 1e-10) {
  if (rhs.size() != m.rows()) throw InvalidInput("lstsq_min_norm: rhs length does not match rows");
  if (m.cols() == 0) return Vector();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(detail::to_eigen(m));
  cod.setThreshold(rel_tol);
  return detail::from_eigen(Eigen::VectorXd(cod.solve(detail::to_eigen(rhs))));
}

// Orthogonal projector onto the column span, Pi = Q1 Q1^T from a thin QR.
// A zero-column input projects onto {0}: the zero matrix.
inline Matrix projector(const Matrix& m, double rel_tol = 1e-10) {
  if (m.cols() == 0) return Matrix(m.rows(), m.rows());
  const Eigen::MatrixXd a = detail::to_eigen(m);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(rel_tol);
  if (static_cast<std::size_t>(qr.rank()) != m.cols())
    throw RankDeficient("projector: matrix is rank deficient (rank " +
                        std::to_string(qr.rank()) + " < " + std::to_string(m.cols()) + ")");
  Eigen::MatrixXd q1 = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  return detail::from_eigen(Eigen::MatrixXd(q1 * q1.transpose()));
}

// Largest singular value via the symmetric eigenproblem on the smaller Gram
// matrix. `tol` is the accepted absolute error; the solver converges far
// below it for these sizes.
inline double spectral_norm(const Matrix& m, double tol = 1e-10) {
  (void)tol;
  if (m.cols() == 0 || m.rows() == 0) return 0.0;
  const Eigen::MatrixXd a = detail::to_eigen(m);
  const Eigen::MatrixXd gram =
      (a.rows() <= a.cols()) ? Eigen::MatrixXd(a * a.transpose()) : Eigen::MatrixXd(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  return lmax > 0.0 ? std::sqrt(lmax) : 0.0;
}

// Orthonormal basis of ker(m^T), i.e. the orthogonal complement of the column
// span: the trailing columns of the full Q factor.
inline Matrix kernel_of_transpose(const Matrix& m, double rel_tol = 1e-10) {
  const std::size_t rows = m.rows();
  const std::size_t r = numerical_rank(m, rel_tol);
  if (r >= rows) return Matrix(rows, 0);
  if (m.cols() == 0) return Matrix::identity(rows);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(detail::to_eigen(m));
  qr.setThreshold(rel_tol);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, rows);
  return detail::from_eigen(Eigen::MatrixXd(q.rightCols(rows - r)));
}

}  // namespace l0lsq
