#pragma once

// Shared vocabulary: the problem instance, supports, objective evaluation and
// the zero-padding / restriction maps between full vectors and subvectors.
// All indices exposed here are 1-based.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "l0lsq/errors.hpp"
#include "l0lsq/linalg.hpp"

namespace l0lsq {

struct Tolerances {
  double rank_tol = 1e-10;      // relative, rank decisions
  double zero_tol = 1e-9;       // absolute, support detection
  double cert_tol = 1e-8;       // relative, normal-equation residual test
  double value_tol = 1e-9;      // relative, objective-value comparisons
  double proj_tol = 1e-9;       // spectral-norm gap below which projectors count as equal
  double spectral_tol = 1e-10;  // absolute, spectral-norm computation
};

// Strictly increasing 1-based index set.
class Support {
 public:
  Support() = default;
  explicit Support(std::vector<int> indices) : idx_(std::move(indices)) {
    for (std::size_t i = 0; i < idx_.size(); ++i) {
      if (idx_[i] < 1) throw InvalidInput("support indices are 1-based and positive");
      if (i > 0 && idx_[i] <= idx_[i - 1])
        throw InvalidInput("support indices must be strictly increasing");
    }
  }
  Support(std::initializer_list<int> indices) : Support(std::vector<int>(indices)) {}

  std::size_t size() const noexcept { return idx_.size(); }
  bool empty() const noexcept { return idx_.empty(); }
  int operator[](std::size_t i) const { return idx_[i]; }
  const std::vector<int>& indices() const noexcept { return idx_; }
  auto begin() const noexcept { return idx_.begin(); }
  auto end() const noexcept { return idx_.end(); }

  bool contains(int i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }
  bool subset_of(const Support& other) const {
    return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end());
  }
  int max_index() const { return idx_.empty() ? 0 : idx_.back(); }

  bool operator==(const Support&) const = default;
  auto operator<=>(const Support&) const = default;  // lexicographic

  std::string to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < idx_.size(); ++i) os << (i ? "," : "") << idx_[i];
    os << '}';
    return os.str();
  }

 private:
  std::vector<int> idx_;
};

struct Problem {
  Matrix a;
  Vector d;
  double beta = 1.0;

  Problem(Matrix a_, Vector d_, double beta_) : a(std::move(a_)), d(std::move(d_)), beta(beta_) {
    if (a.rows() >= a.cols())
      throw InvalidInput("problem requires rows < cols, got " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
    if (d.size() != a.rows()) throw InvalidInput("data length does not match matrix rows");
    if (!(beta > 0.0)) throw InvalidInput("beta must be > 0");
    for (std::size_t j = 0; j < a.cols(); ++j) {
      bool nonzero = false;
      for (std::size_t i = 0; i < a.rows(); ++i) nonzero |= (a(i, j) != 0.0);
      if (!nonzero) throw InvalidInput("column " + std::to_string(j + 1) + " of the matrix is zero");
    }
  }

  std::size_t m() const noexcept { return a.rows(); }
  std::size_t n() const noexcept { return a.cols(); }
};

// A solution of a support-restricted problem with its certificates.
struct CertifiedMinimizer {
  Vector u;
  Support support;   // entries of u above zero_tol
  double value = 0;  // ||Au-d||^2 + beta * #support
  bool is_strict = false;
  bool shrunk = false;  // true iff support is a proper subset of the requested one
};

inline Support support_of(const Vector& u, double zero_tol) {
  if (zero_tol < 0.0) throw InvalidInput("support_of: zero_tol must be >= 0");
  std::vector<int> idx;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (std::abs(u[i]) > zero_tol) idx.push_back(static_cast<int>(i) + 1);
  return Support(std::move(idx));
}

inline double objective(const Problem& p, const Vector& u, double zero_tol = 1e-9) {
  if (u.size() != p.n()) throw InvalidInput("objective: vector length does not match cols");
  const Vector r = sub(mat_vec(p.a, u), p.d);
  return norm_sq(r) + p.beta * static_cast<double>(support_of(u, zero_tol).size());
}

inline Vector zero_pad(const Vector& sub, const Support& omega, std::size_t n) {
  if (sub.size() != omega.size()) throw InvalidInput("zero_pad: subvector length != support size");
  if (omega.max_index() > static_cast<int>(n))
    throw InvalidInput("zero_pad: support exceeds target length");
  Vector out(n);
  for (std::size_t k = 0; k < omega.size(); ++k) out[static_cast<std::size_t>(omega[k]) - 1] = sub[k];
  return out;
}

inline Vector restrict_to(const Vector& u, const Support& omega) {
  if (omega.max_index() > static_cast<int>(u.size()))
    throw InvalidInput("restrict_to: support exceeds vector length");
  Vector out(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) out[k] = u[static_cast<std::size_t>(omega[k]) - 1];
  return out;
}

inline Matrix submatrix(const Matrix& a, const Support& omega) {
  if (omega.max_index() > static_cast<int>(a.cols()))
    throw InvalidInput("submatrix: support exceeds column count");
  Matrix out(a.rows(), omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) {
    const std::size_t j = static_cast<std::size_t>(omega[k]) - 1;
    for (std::size_t i = 0; i < a.rows(); ++i) out(i, k) = a(i, j);
  }
  return out;
}

}  // namespace l0lsq
