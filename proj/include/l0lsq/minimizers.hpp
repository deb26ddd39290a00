#pragma once

// Support-restricted solves and minimizer certification.
//
// Solving min ||Au-d||^2 subject to u vanishing off a support, for a support
// whose submatrix has full column rank, produces a strict local minimizer of
// the penalized objective, and every local minimizer arises this way. The
// solved vector does not depend on beta; beta only enters the value.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "l0lsq/errors.hpp"
#include "l0lsq/linalg.hpp"
#include "l0lsq/model.hpp"

namespace l0lsq {

namespace detail {

inline void check_support_range(const Support& omega, std::size_t n, const char* who) {
  if (omega.max_index() > static_cast<int>(n))
    throw InvalidInput(std::string(who) + ": support index " + std::to_string(omega.max_index()) +
                       " out of range [1," + std::to_string(n) + "]");
}

}  // namespace detail

// Solve the restricted problem on omega. Full-rank supports get the unique
// least-squares solution; rank-deficient ones the minimum-norm solution so
// the output stays deterministic. If solved entries fall below zero_tol the
// solution is re-solved on its actual support (the restricted solutions
// coincide there, this just lands exact zeros) and flagged shrunk.
inline CertifiedMinimizer solve_restricted(const Problem& p, const Support& omega,
                                           const Tolerances& tol = {}) {
  detail::check_support_range(omega, p.n(), "solve_restricted");

  Support current = omega;
  Vector u;
  bool full_rank_path = true;
  for (std::size_t pass = 0;; ++pass) {
    const Matrix a_sub = submatrix(p.a, current);
    if (numerical_rank(a_sub, tol.rank_tol) == current.size()) {
      u = zero_pad(lstsq(a_sub, p.d, tol.rank_tol), current, p.n());
    } else {
      full_rank_path = false;
      u = zero_pad(lstsq_min_norm(a_sub, p.d, tol.rank_tol), current, p.n());
    }
    const Support sigma = support_of(u, tol.zero_tol);
    if (sigma == current || !full_rank_path || pass >= p.m()) {
      current = sigma;
      break;
    }
    current = sigma;  // shrink event: re-solve on the smaller support
  }

  CertifiedMinimizer out;
  out.u = u;
  out.support = current;
  out.value = objective(p, u, tol.zero_tol);
  out.is_strict = numerical_rank(submatrix(p.a, current), tol.rank_tol) == current.size();
  out.shrunk = current != omega;  // the solve never adds indices, so != means proper subset
  return out;
}

// Normal-equation residual test on the support of u: u is a local minimizer
// iff its nonzero part solves the restricted normal equations.
inline bool is_local_minimizer(const Problem& p, const Vector& u, const Tolerances& tol = {}) {
  if (u.size() != p.n()) throw InvalidInput("is_local_minimizer: vector length does not match cols");
  const Support sigma = support_of(u, tol.zero_tol);
  if (sigma.empty()) return true;
  const Matrix a_sub = submatrix(p.a, sigma);
  const Vector r = sub(mat_vec(a_sub, restrict_to(u, sigma)), p.d);
  Vector atr(sigma.size());
  for (std::size_t k = 0; k < sigma.size(); ++k) atr[k] = dot(a_sub.column(k), r);
  return inf_norm(atr) <= tol.cert_tol * (1.0 + norm(p.d));
}

// Strictness criterion: full column rank of the support submatrix.
inline bool is_strict_minimizer(const Problem& p, const Vector& u, const Tolerances& tol = {}) {
  if (!is_local_minimizer(p, u, tol))
    throw ContractViolation("is_strict_minimizer: input is not a local minimizer");
  const Support sigma = support_of(u, tol.zero_tol);
  return numerical_rank(submatrix(p.a, sigma), tol.rank_tol) == sigma.size();
}

// The linear map d -> restricted solution, as the #omega x M matrix
// (A_w^T A_w)^{-1} A_w^T.
struct MinimizerFunctionMatrix {
  Support omega;
  Matrix u_matrix;

  // Full minimizer for data rhs, zero-padded to length n.
  Vector apply(const Vector& rhs, std::size_t n) const {
    return zero_pad(mat_vec(u_matrix, rhs), omega, n);
  }
};

inline MinimizerFunctionMatrix minimizer_function(const Problem& p, const Support& omega,
                                                  const Tolerances& tol = {}) {
  detail::check_support_range(omega, p.n(), "minimizer_function");
  const Matrix a_sub = submatrix(p.a, omega);
  if (numerical_rank(a_sub, tol.rank_tol) != omega.size())
    throw RankDeficient("minimizer_function: submatrix on " + omega.to_string() +
                        " is rank deficient", omega.indices());
  // Column k of u_matrix solves the least-squares problem against e_k.
  Matrix u_mat(omega.size(), p.m());
  for (std::size_t j = 0; j < p.m(); ++j) {
    Vector e(p.m());
    e[j] = 1.0;
    const Vector col = lstsq(a_sub, e, tol.rank_tol);
    for (std::size_t i = 0; i < omega.size(); ++i) u_mat(i, j) = col[i];
  }
  return MinimizerFunctionMatrix{omega, std::move(u_mat)};
}

// Per-coordinate scan of the one-dimensional section through u at index i:
// compare keeping the coordinate at zero against the best nonzero value.
struct CoordinateReport {
  int index = 0;              // 1-based
  double value_if_zero = 0;   // objective with coordinate i forced to 0
  double value_if_best = 0;   // objective at the best nonzero coordinate value
  double best_nonzero = 0;    // that value
  enum class Winner { zero, nonzero, tie } winner = Winner::tie;
  bool matches = false;  // does u[i] sit at a winning position
};

struct CoordinatewiseReport {
  std::vector<CoordinateReport> coords;
  bool all_pass = false;
};

inline CoordinatewiseReport coordinatewise_check(const Problem& p, const Vector& u,
                                                 const Tolerances& tol = {}) {
  if (u.size() != p.n()) throw InvalidInput("coordinatewise_check: vector length does not match cols");
  CoordinatewiseReport report;
  report.all_pass = true;
  for (std::size_t i = 0; i < p.n(); ++i) {
    Vector u0 = u;
    u0[i] = 0.0;
    const Vector r = sub(mat_vec(p.a, u0), p.d);
    const double base = norm_sq(r) + p.beta * static_cast<double>(support_of(u0, tol.zero_tol).size());
    const Vector ai = p.a.column(i);
    const double ai_sq = norm_sq(ai);
    const double inner = dot(ai, r);
    const double t1 = -inner / ai_sq;
    CoordinateReport c;
    c.index = static_cast<int>(i) + 1;
    c.value_if_zero = base;
    c.value_if_best = -inner * inner / ai_sq + p.beta + base;
    c.best_nonzero = t1;

    const double gap = c.value_if_zero - c.value_if_best;
    const double scale = tol.value_tol * (1.0 + std::abs(c.value_if_zero));
    const bool at_zero = std::abs(u[i]) <= tol.zero_tol;
    const bool at_t1 = std::abs(u[i] - t1) <= tol.value_tol * (1.0 + std::abs(t1)) + tol.zero_tol;
    if (std::abs(gap) <= scale) {
      c.winner = CoordinateReport::Winner::tie;
      c.matches = at_zero || at_t1;
    } else if (gap < 0.0) {
      c.winner = CoordinateReport::Winner::zero;
      c.matches = at_zero;
    } else {
      c.winner = CoordinateReport::Winner::nonzero;
      c.matches = at_t1;
    }
    report.all_pass &= c.matches;
    report.coords.push_back(c);
  }
  return report;
}

// min over the support of |u[i]| - sqrt(beta)/||a_i||; nonnegative means the
// global-minimizer necessary condition holds. Largest double for u = 0.
inline double necessary_condition_margin(const Problem& p, const Vector& u,
                                         const Tolerances& tol = {}) {
  if (u.size() != p.n()) throw InvalidInput("necessary_condition_margin: length mismatch");
  const Support sigma = support_of(u, tol.zero_tol);
  if (sigma.empty()) return std::numeric_limits<double>::max();
  double margin = std::numeric_limits<double>::max();
  for (int i : sigma) {
    const std::size_t j = static_cast<std::size_t>(i) - 1;
    const double bound = std::sqrt(p.beta) / norm(p.a.column(j));
    margin = std::min(margin, std::abs(u[j]) - bound);
  }
  return margin;
}

}  // namespace l0lsq
