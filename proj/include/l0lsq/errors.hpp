#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace l0lsq {

// Bad data: non-finite entries, dimension mismatches, out-of-range supports,
// malformed files. The CLI maps this family to exit code 2.
class InvalidInput : public std::runtime_error {
 public:
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// A submatrix expected to have full column rank does not. Carries the
// offending support (1-based indices) when the caller knows it.
class RankDeficient : public std::runtime_error {
 public:
  explicit RankDeficient(const std::string& what, std::vector<int> support = {})
      : std::runtime_error(what), support_(std::move(support)) {}
  const std::vector<int>& support() const noexcept { return support_; }

 private:
  std::vector<int> support_;
};

// A combinatorial scan would exceed the configured cap. Carries the offending
// count. The CLI maps this to exit code 3.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, unsigned long long count)
      : std::runtime_error(what), count_(count) {}
  unsigned long long count() const noexcept { return count_; }

 private:
  unsigned long long count_;
};

// The requested quantity does not exist for this instance (e.g. no full-rank
// support of the requested cardinality).
class Infeasible : public std::runtime_error {
 public:
  explicit Infeasible(const std::string& what) : std::runtime_error(what) {}
};

// An operation was called outside its stated precondition.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace l0lsq
