#pragma once

// Global minimizers with a uniqueness gap, critical penalty thresholds, the
// projector-separation quantifiers mu_r / xi_k, and the data-genericity
// margin that certifies a unique global minimizer.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "l0lsq/enumeration.hpp"
#include "l0lsq/errors.hpp"
#include "l0lsq/linalg.hpp"
#include "l0lsq/minimizers.hpp"
#include "l0lsq/model.hpp"

namespace l0lsq {

// Orthogonal projectors onto the column spans of every support in a family,
// in family order.
class ProjectorCache {
 public:
  ProjectorCache(const Matrix& a, const SupportFamily& family, const Tolerances& tol = {}) {
    by_cardinality_.resize(family.by_cardinality.size());
    for (std::size_t r = 0; r < family.by_cardinality.size(); ++r) {
      by_cardinality_[r].reserve(family.at(r).size());
      for (const Support& omega : family.at(r))
        by_cardinality_[r].push_back(projector(submatrix(a, omega), tol.rank_tol));
    }
  }

  const Matrix& at(std::size_t r, std::size_t index) const { return by_cardinality_.at(r).at(index); }
  std::size_t count(std::size_t r) const { return by_cardinality_.at(r).size(); }

 private:
  std::vector<std::vector<Matrix>> by_cardinality_;
};

// Pair iteration strategy for the mu_r scans.
//   exhaustive: every unequal pair; this is the quantity the theory needs and
//               the only sound way to certify projector separation.
//   ring:       adjacent supports in colexicographic order, cyclically. O(#family)
//               instead of O(#family^2); yields an upper bound on the exhaustive
//               minimum. Used by the published-table reproduction pipeline.
enum class PairScan { exhaustive, ring };

struct MuProfile {
  std::vector<double> mu;                              // index r-1, r = 1..k
  std::vector<std::pair<Support, Support>> arg_pairs;  // attaining pair per r

  std::vector<double> xi() const {
    std::vector<double> out(mu.size());
    double acc = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mu.size(); ++i) out[i] = acc = std::min(acc, mu[i]);
    return out;
  }
};

namespace detail {

inline Matrix matrix_diff(const Matrix& x, const Matrix& y) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) - y(i, j);
  return out;
}

// Deterministic min-reduction over index pairs (i < j): the key is
// (value, i, j), so the winner does not depend on scan partitioning.
struct PairMin {
  double value = std::numeric_limits<double>::infinity();
  std::size_t i = 0, j = 0;
  void consider(double v, std::size_t a, std::size_t b) {
    if (std::tie(v, a, b) < std::tie(value, i, j)) {
      value = v;
      i = a;
      j = b;
    }
  }
  void merge(const PairMin& o) { consider(o.value, o.i, o.j); }
};

template <typename PairValue>
PairMin min_over_pairs(std::size_t count, PairValue&& pair_value, int workers) {
  auto scan_rows = [&](std::size_t lo, std::size_t hi) {
    PairMin best;
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = i + 1; j < count; ++j) best.consider(pair_value(i, j), i, j);
    return best;
  };
  if (workers <= 1 || count < 64) return scan_rows(0, count);
  const std::size_t w = static_cast<std::size_t>(workers);
  std::vector<std::future<PairMin>> parts;
  for (std::size_t b = 0; b < w; ++b)
    parts.push_back(std::async(std::launch::async, scan_rows, count * b / w, count * (b + 1) / w));
  PairMin best;
  for (auto& f : parts) best.merge(f.get());
  return best;
}

inline std::vector<std::size_t> colex_order(const std::vector<Support>& supports) {
  std::vector<std::size_t> order(supports.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = supports[x].indices();
    const auto& b = supports[y].indices();
    return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
  });
  return order;
}

}  // namespace detail

// mu_r = min spectral gap between projectors of distinct r-supports, for each
// r = 1..k, using the requested pair scan.
inline MuProfile mu_profile(const Matrix& a, std::size_t k, PairScan scan = PairScan::exhaustive,
                            const Tolerances& tol = {}, const Budget& budget = {}, int workers = 1) {
  if (k < 1 || k > a.rows() - 1)
    throw InvalidInput("mu_profile: k must be in [1, rows-1]");
  const SupportFamily family = build_support_family(a, k, tol, budget);

  unsigned long long pair_count = 0;
  for (std::size_t r = 1; r <= k; ++r) {
    const unsigned long long m = family.at(r).size();
    pair_count += (scan == PairScan::exhaustive) ? m * (m - 1) / 2 : m;
  }
  if (pair_count > budget.max_pairs)
    throw BudgetExceeded("mu_profile needs " + std::to_string(pair_count) +
                         " projector pairs, budget is " + std::to_string(budget.max_pairs),
                         pair_count);

  const ProjectorCache cache(a, family, tol);
  MuProfile profile;
  for (std::size_t r = 1; r <= k; ++r) {
    const auto& group = family.at(r);
    if (group.size() < 2) {
      // no pair to compare: the separation condition is vacuous at this r
      profile.mu.push_back(std::numeric_limits<double>::infinity());
      profile.arg_pairs.emplace_back(Support{}, Support{});
      continue;
    }
    detail::PairMin best;
    if (scan == PairScan::exhaustive) {
      best = detail::min_over_pairs(
          group.size(),
          [&](std::size_t i, std::size_t j) {
            return spectral_norm(detail::matrix_diff(cache.at(r, i), cache.at(r, j)),
                                 tol.spectral_tol);
          },
          workers);
    } else {
      const auto order = detail::colex_order(group);
      for (std::size_t s = 0; s < order.size(); ++s) {
        const std::size_t i = order[s];
        const std::size_t j = order[(s + 1) % order.size()];
        best.consider(spectral_norm(detail::matrix_diff(cache.at(r, i), cache.at(r, j)),
                                    tol.spectral_tol),
                      std::min(i, j), std::max(i, j));
      }
    }
    profile.mu.push_back(best.value);
    profile.arg_pairs.emplace_back(group[best.i], group[best.j]);
  }
  return profile;
}

struct H1Report {
  std::size_t k = 0;
  bool holds = false;
  std::optional<std::pair<Support, Support>> witness;  // a coincident pair, when !holds
  std::vector<double> mu;  // index r-1
  std::vector<double> xi;  // cumulative minima of mu
};

// Exhaustive projector-separation check: holds iff no two distinct
// equidimensional full-rank supports (r <= k) project onto the same subspace
// at the proj_tol resolution.
inline H1Report h1_check(const Matrix& a, std::size_t k, const Tolerances& tol = {},
                         const Budget& budget = {}, int workers = 1) {
  const MuProfile profile = mu_profile(a, k, PairScan::exhaustive, tol, budget, workers);
  H1Report report;
  report.k = k;
  report.mu = profile.mu;
  report.xi = profile.xi();
  report.holds = true;
  for (std::size_t r = 1; r <= k; ++r) {
    if (profile.mu[r - 1] <= tol.proj_tol) {
      report.holds = false;
      report.witness = profile.arg_pairs[r - 1];
      break;
    }
  }
  return report;
}

struct GlobalReport {
  std::vector<CertifiedMinimizer> minimizers;  // the value-minimal entries
  double uniqueness_gap = 0.0;                 // second value minus best value
  double beta = 0.0;
};

inline GlobalReport global_minimizers(const Problem& p, std::size_t k_max,
                                      const Tolerances& tol = {}, const Budget& budget = {},
                                      int workers = 1) {
  const EnumerationResult res = enumerate_strict_minimizers(p, k_max, tol, budget, workers);
  GlobalReport report;
  report.beta = p.beta;
  const double best = res.minimizers.front().value;
  report.uniqueness_gap = res.minimizers.size() > 1
                              ? res.minimizers[1].value - best
                              : std::numeric_limits<double>::infinity();
  const double tie = tol.value_tol * (1.0 + std::abs(best));
  for (const auto& cm : res.minimizers) {
    if (cm.value - best > tie) break;
    report.minimizers.push_back(cm);
  }
  return report;
}

enum class BetaKMode { loose, sharp };

// Penalty threshold above which every global minimizer is k-sparse: the
// restricted residual at one (loose) or the best (sharp) k-support.
inline double beta_k(const Problem& p, std::size_t k, BetaKMode mode, const Tolerances& tol = {},
                     const Budget& budget = {}) {
  if (k < 1 || k > p.m() - 1) throw InvalidInput("beta_k: k must be in [1, rows-1]");
  const SupportFamily family = build_support_family(p.a, k, tol, budget);
  const auto& group = family.at(k);
  if (group.empty())
    throw Infeasible("beta_k: no full-rank support of cardinality " + std::to_string(k));
  auto residual_sq = [&](const Support& omega) {
    const CertifiedMinimizer cm = solve_restricted(p, omega, tol);
    return norm_sq(sub(mat_vec(p.a, cm.u), p.d));
  };
  if (mode == BetaKMode::loose) return residual_sq(group.front());
  double best = std::numeric_limits<double>::infinity();
  for (const Support& omega : group) best = std::min(best, residual_sq(omega));
  return best;
}

// min over unequal support pairs (cardinality <= k) and n in {-k..k} of
// |d^T(Pi_w - Pi_v)d - n*beta|. Strictly positive means the data cannot tie
// two candidate supports, so with beta above beta_k the global minimizer is
// unique.
inline double sigma_k_margin(const Problem& p, std::size_t k, const Tolerances& tol = {},
                             const Budget& budget = {}, int workers = 1) {
  if (k < 1 || k > p.m() - 1) throw InvalidInput("sigma_k_margin: k must be in [1, rows-1]");
  const SupportFamily family = build_support_family(p.a, k, tol, budget);

  // quadratic forms d^T Pi_w d, family order, empty support first
  std::vector<double> q;
  q.reserve(family.total());
  for (std::size_t r = 0; r < family.by_cardinality.size(); ++r) {
    for (const Support& omega : family.at(r)) {
      if (omega.empty()) {
        q.push_back(0.0);
      } else {
        const Matrix pi = projector(submatrix(p.a, omega), tol.rank_tol);
        q.push_back(dot(p.d, mat_vec(pi, p.d)));
      }
    }
  }

  const unsigned long long pairs =
      static_cast<unsigned long long>(q.size()) * (q.size() - 1) / 2;
  if (pairs > budget.max_pairs)
    throw BudgetExceeded("sigma_k_margin needs " + std::to_string(pairs) +
                         " support pairs, budget is " + std::to_string(budget.max_pairs), pairs);

  const int kk = static_cast<int>(k);
  const auto best = detail::min_over_pairs(
      q.size(),
      [&](std::size_t i, std::size_t j) {
        const double delta = q[i] - q[j];
        double m = std::numeric_limits<double>::infinity();
        for (int n = -kk; n <= kk; ++n) m = std::min(m, std::abs(delta - n * p.beta));
        return m;
      },
      workers);
  return best.value;
}

struct EnsembleStats {
  std::size_t count = 0;
  std::vector<double> xi_worst;        // index r-1: min over the ensemble
  std::vector<double> xi_best;         // index r-1: max over the ensemble
  std::vector<double> tie_rate;        // index r-1 (r < k): fraction with xi_r == xi_{r+1}
  double chain_violation_rate = 0.0;   // fraction with any adjacent xi tie
};

inline EnsembleStats ensemble_stats(const std::vector<Matrix>& ensemble, std::size_t k,
                                    const Tolerances& tol = {}, const Budget& budget = {},
                                    int workers = 1) {
  if (ensemble.empty()) throw InvalidInput("ensemble_stats: empty ensemble");
  for (const Matrix& a : ensemble)
    if (a.rows() != ensemble.front().rows() || a.cols() != ensemble.front().cols())
      throw InvalidInput("ensemble_stats: matrices must share one shape");

  EnsembleStats stats;
  stats.count = ensemble.size();
  stats.xi_worst.assign(k, std::numeric_limits<double>::infinity());
  stats.xi_best.assign(k, -std::numeric_limits<double>::infinity());
  stats.tie_rate.assign(k > 0 ? k - 1 : 0, 0.0);
  std::size_t violations = 0;
  for (const Matrix& a : ensemble) {
    const auto xi = mu_profile(a, k, PairScan::exhaustive, tol, budget, workers).xi();
    bool violated = false;
    for (std::size_t r = 0; r < k; ++r) {
      stats.xi_worst[r] = std::min(stats.xi_worst[r], xi[r]);
      stats.xi_best[r] = std::max(stats.xi_best[r], xi[r]);
      // xi is a cumulative min, so adjacent equality is exact when it happens
      if (r + 1 < k && xi[r] == xi[r + 1]) {
        stats.tie_rate[r] += 1.0;
        violated = true;
      }
    }
    violations += violated ? 1 : 0;
  }
  for (double& t : stats.tie_rate) t /= static_cast<double>(stats.count);
  stats.chain_violation_rate = static_cast<double>(violations) / static_cast<double>(stats.count);
  return stats;
}

// ---- JSON serialization (report schema shared by the CLI) ----

inline nlohmann::ordered_json to_json(const Support& s) {
  return nlohmann::ordered_json(s.indices());
}

inline nlohmann::ordered_json to_json(const CertifiedMinimizer& cm) {
  nlohmann::ordered_json j;
  j["support"] = to_json(cm.support);
  j["values"] = [&] {
    std::vector<double> nz;
    for (int i : cm.support) nz.push_back(cm.u[static_cast<std::size_t>(i) - 1]);
    return nz;
  }();
  j["u"] = std::vector<double>(cm.u.entries().begin(), cm.u.entries().end());
  j["objective"] = cm.value;
  j["strict"] = cm.is_strict;
  j["shrunk"] = cm.shrunk;
  return j;
}

inline nlohmann::ordered_json to_json(const GlobalReport& g) {
  nlohmann::ordered_json j;
  j["global"] = nlohmann::ordered_json::array();
  for (const auto& cm : g.minimizers) {
    nlohmann::ordered_json e;
    e["support"] = to_json(cm.support);
    std::vector<double> nz;
    for (int i : cm.support) nz.push_back(cm.u[static_cast<std::size_t>(i) - 1]);
    e["values"] = nz;
    e["objective"] = cm.value;
    j["global"].push_back(e);
  }
  j["gap"] = std::isfinite(g.uniqueness_gap) ? nlohmann::ordered_json(g.uniqueness_gap)
                                             : nlohmann::ordered_json(nullptr);
  j["beta"] = g.beta;
  return j;
}

inline nlohmann::ordered_json to_json(const H1Report& h) {
  nlohmann::ordered_json j;
  j["h1"] = h.holds;
  if (h.witness) {
    j["witness"] = nlohmann::ordered_json::array({to_json(h.witness->first), to_json(h.witness->second)});
  } else {
    j["witness"] = nullptr;
  }
  j["mu"] = h.mu;
  j["xi"] = h.xi;
  j["k"] = h.k;
  return j;
}

inline nlohmann::ordered_json to_json(const EnsembleStats& s) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  j["xi_worst"] = s.xi_worst;
  j["xi_best"] = s.xi_best;
  j["tie_rate"] = s.tie_rate;
  j["chain_violation_rate"] = s.chain_violation_rate;
  return j;
}

// The full analysis record: every field optional, emitted when computed.
inline nlohmann::ordered_json analysis_report_json(std::optional<double> beta_k_value,
                                                   const std::optional<H1Report>& h1,
                                                   std::optional<double> sigma_margin,
                                                   const std::optional<GlobalReport>& global) {
  nlohmann::ordered_json j;
  if (beta_k_value) j["beta_k"] = *beta_k_value;
  if (h1) {
    const auto hj = to_json(*h1);
    j["xi"] = hj["xi"];
    j["mu"] = hj["mu"];
    j["h1"] = hj["h1"];
    j["witness"] = hj["witness"];
  }
  if (sigma_margin) j["sigma_margin"] = *sigma_margin;
  if (global) {
    const auto gj = to_json(*global);
    j["global"] = gj["global"];
    j["gap"] = gj["gap"];
  }
  return j;
}

}  // namespace l0lsq
