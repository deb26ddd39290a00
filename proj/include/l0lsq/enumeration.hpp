#pragma once

// Exhaustive support enumeration and the complete list of strict local
// minimizers. Desk scale by design: every candidate support is visited, no
// pruning, and results are deterministic for any worker count.

#include <algorithm>
#include <cstddef>
#include <future>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "l0lsq/errors.hpp"
#include "l0lsq/io.hpp"
#include "l0lsq/minimizers.hpp"
#include "l0lsq/model.hpp"

namespace l0lsq {

struct Budget {
  unsigned long long max_supports = 2'000'000ULL;
  unsigned long long max_pairs = 20'000'000ULL;
};

namespace detail {

inline unsigned long long binomial_saturating(std::size_t n, std::size_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  unsigned long long acc = 1;
  for (std::size_t i = 1; i <= r; ++i) {
    const unsigned long long num = n - r + i;
    if (acc > std::numeric_limits<unsigned long long>::max() / num)
      return std::numeric_limits<unsigned long long>::max();
    acc = acc * num / i;
  }
  return acc;
}

inline unsigned long long support_count(std::size_t n, std::size_t k_max) {
  unsigned long long total = 0;
  for (std::size_t r = 0; r <= k_max; ++r) {
    const unsigned long long c = binomial_saturating(n, r);
    if (total > std::numeric_limits<unsigned long long>::max() - c)
      return std::numeric_limits<unsigned long long>::max();
    total += c;
  }
  return total;
}

// Visit all r-subsets of {1..n} in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t r, Fn&& fn) {
  std::vector<int> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = static_cast<int>(i) + 1;
  if (r == 0) {
    fn(idx);
    return;
  }
  while (true) {
    fn(idx);
    // advance: find the rightmost index that can still move up
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == static_cast<int>(n - r + i)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

// All full-column-rank supports, grouped by cardinality, lexicographic within
// each group.
struct SupportFamily {
  std::size_t n = 0;
  std::vector<std::vector<Support>> by_cardinality;  // index r = 0..k_max

  std::size_t k_max() const { return by_cardinality.empty() ? 0 : by_cardinality.size() - 1; }
  const std::vector<Support>& at(std::size_t r) const { return by_cardinality.at(r); }
  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& g : by_cardinality) t += g.size();
    return t;
  }
};

inline SupportFamily build_support_family(const Matrix& a, std::size_t k_max,
                                          const Tolerances& tol = {}, const Budget& budget = {}) {
  if (k_max > a.rows())
    throw InvalidInput("build_support_family: k_max " + std::to_string(k_max) + " exceeds rows " +
                       std::to_string(a.rows()));
  const unsigned long long count = detail::support_count(a.cols(), k_max);
  if (count > budget.max_supports)
    throw BudgetExceeded("support enumeration needs " + std::to_string(count) +
                         " candidates, budget is " + std::to_string(budget.max_supports), count);

  SupportFamily family;
  family.n = a.cols();
  family.by_cardinality.resize(k_max + 1);
  family.by_cardinality[0].push_back(Support{});
  for (std::size_t r = 1; r <= k_max; ++r) {
    detail::for_each_subset(a.cols(), r, [&](const std::vector<int>& idx) {
      Support omega(idx);
      if (numerical_rank(submatrix(a, omega), tol.rank_tol) == r)
        family.by_cardinality[r].push_back(std::move(omega));
    });
  }
  return family;
}

struct EnumerationResult {
  // Distinct strict local minimizers, ascending by value, then cardinality,
  // then lexicographic support.
  std::vector<CertifiedMinimizer> minimizers;
  std::vector<std::size_t> count_by_cardinality;  // index = support size
};

// Solve the restricted problem on every support in the family up to k_max,
// re-attribute shrunken solutions to their actual support, deduplicate by
// support, sort. Workers receive contiguous batches; the merge is a support-
// keyed map, so the result does not depend on the worker count.
inline EnumerationResult enumerate_strict_minimizers(const Problem& p, std::size_t k_max,
                                                     const Tolerances& tol = {},
                                                     const Budget& budget = {}, int workers = 1) {
  if (k_max > p.m()) throw InvalidInput("enumerate_strict_minimizers: k_max exceeds rows");
  const SupportFamily family = build_support_family(p.a, k_max, tol, budget);

  std::vector<Support> all;
  all.reserve(family.total());
  for (const auto& group : family.by_cardinality)
    all.insert(all.end(), group.begin(), group.end());

  auto solve_range = [&](std::size_t lo, std::size_t hi) {
    std::vector<CertifiedMinimizer> out;
    out.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) out.push_back(solve_restricted(p, all[i], tol));
    return out;
  };

  std::vector<CertifiedMinimizer> solved;
  if (workers <= 1 || all.size() < 2 * static_cast<std::size_t>(std::max(workers, 1))) {
    solved = solve_range(0, all.size());
  } else {
    const std::size_t w = static_cast<std::size_t>(workers);
    std::vector<std::future<std::vector<CertifiedMinimizer>>> parts;
    for (std::size_t b = 0; b < w; ++b) {
      const std::size_t lo = all.size() * b / w;
      const std::size_t hi = all.size() * (b + 1) / w;
      parts.push_back(std::async(std::launch::async, solve_range, lo, hi));
    }
    for (auto& f : parts) {
      auto part = f.get();
      solved.insert(solved.end(), part.begin(), part.end());
    }
  }

  std::map<Support, CertifiedMinimizer> dedup;
  for (auto& cm : solved) {
    auto [it, inserted] = dedup.try_emplace(cm.support, cm);
    if (!inserted) {
      // same support can only carry the same minimizer; anything else means a
      // certification bug upstream
      if (std::abs(it->second.value - cm.value) > 1e-6 * (1.0 + std::abs(cm.value)))
        throw ContractViolation("enumerate: support " + cm.support.to_string() +
                                " produced two different objective values");
      it->second.shrunk = it->second.shrunk && cm.shrunk;
    }
  }

  EnumerationResult result;
  result.count_by_cardinality.assign(k_max + 1, 0);
  result.minimizers.reserve(dedup.size());
  for (auto& [supp, cm] : dedup) {
    result.count_by_cardinality[cm.support.size()]++;
    result.minimizers.push_back(std::move(cm));
  }
  std::sort(result.minimizers.begin(), result.minimizers.end(),
            [](const CertifiedMinimizer& x, const CertifiedMinimizer& y) {
              if (x.value != y.value) return x.value < y.value;
              if (x.support.size() != y.support.size()) return x.support.size() < y.support.size();
              return x.support < y.support;
            });
  return result;
}

// Plot-ready dataset: one line per minimizer in sorted order. Support indices
// are joined with ';' so the column stays a single CSV field.
inline void write_enumeration_csv(std::ostream& out, const EnumerationResult& result) {
  out << "rank_in_sorted_order,support,cardinality,objective_value\n";
  std::size_t rank = 1;
  for (const auto& cm : result.minimizers) {
    out << rank++ << ',';
    for (std::size_t i = 0; i < cm.support.size(); ++i) out << (i ? ";" : "") << cm.support[i];
    out << ',' << cm.support.size() << ',' << format_double(cm.value) << '\n';
  }
}

}  // namespace l0lsq
