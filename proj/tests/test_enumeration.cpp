#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "l0lsq/enumeration.hpp"
#include "test_util.hpp"

using namespace l0lsq;
using Catch::Approx;
using testutil::builtin_clean_data;
using testutil::builtin_matrix;
using testutil::builtin_noisy_data;

namespace {

// Brute-force reference: minimum-norm least squares on every subset via an
// SVD pseudoinverse (a different factorization route than the library),
// keep solutions passing the residual and full-rank tests, dedupe by support.
std::map<Support, std::pair<Vector, double>> brute_force_minimizers(const Matrix& a,
                                                                    const Vector& d, double beta) {
  const std::size_t n = a.cols();
  const std::size_t m = a.rows();
  Eigen::MatrixXd ae(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) ae(i, j) = a(i, j);
  Eigen::VectorXd de(m);
  for (std::size_t i = 0; i < m; ++i) de(i) = d[i];

  auto svd_rank = [](const Eigen::MatrixXd& x) {
    if (x.cols() == 0) return std::size_t{0};
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    const auto& s = svd.singularValues();
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > 1e-10 * s(0)) ++r;
    return r;
  };

  std::map<Support, std::pair<Vector, double>> found;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) idx.push_back(static_cast<int>(j) + 1);
    Eigen::MatrixXd sub(m, idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(k) = ae.col(idx[k] - 1);

    Eigen::VectorXd ue = Eigen::VectorXd::Zero(n);
    if (!idx.empty()) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-10);
      const Eigen::VectorXd v = svd.solve(de);
      for (std::size_t k = 0; k < idx.size(); ++k) ue(idx[k] - 1) = v(k);
    }
    Vector u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = ue(j);

    const Support sigma = support_of(u, 1e-9);
    const Eigen::VectorXd res = ae * ue - de;
    bool local = true;
    for (int i : sigma) local &= std::abs(ae.col(i - 1).dot(res)) <= 1e-8 * (1.0 + de.norm());
    if (!local) continue;
    Eigen::MatrixXd sig(m, sigma.size());
    for (std::size_t k = 0; k < sigma.size(); ++k) sig.col(k) = ae.col(sigma[k] - 1);
    if (svd_rank(sig) != sigma.size()) continue;

    const double value = res.squaredNorm() + beta * static_cast<double>(sigma.size());
    found.emplace(sigma, std::make_pair(u, value));
  }
  return found;
}

}  // namespace

TEST_CASE("support family basics", "[enumeration]") {
  const SupportFamily trivial = build_support_family(builtin_matrix(), 0);
  REQUIRE(trivial.by_cardinality.size() == 1);
  REQUIRE(trivial.at(0).size() == 1);
  CHECK(trivial.at(0).front().empty());

  const SupportFamily full = build_support_family(builtin_matrix(), 5);
  const std::vector<std::size_t> expect{1, 10, 45, 120, 210, 252};
  REQUIRE(full.by_cardinality.size() == 6);
  for (std::size_t r = 0; r <= 5; ++r) CHECK(full.at(r).size() == expect[r]);
  CHECK(full.total() == 638);
  // lexicographic order within each cardinality
  for (std::size_t i = 1; i < full.at(3).size(); ++i) CHECK(full.at(3)[i - 1] < full.at(3)[i]);
}

TEST_CASE("support family drops rank-deficient subsets", "[enumeration]") {
  Matrix a(3, 4, {1, 1, 0, 2, 2, 2, 1, 0, -1, -1, 3, 1});  // column 2 duplicates column 1
  const SupportFamily fam = build_support_family(a, 2);
  CHECK(fam.at(1).size() == 4);
  for (const Support& s : fam.at(2)) CHECK_FALSE(s == Support({1, 2}));
  CHECK(fam.at(2).size() == 5);  // C(4,2) minus the dependent pair
}

TEST_CASE("support budget is enforced with the count named", "[enumeration]") {
  Budget tiny;
  tiny.max_supports = 10;
  try {
    build_support_family(builtin_matrix(), 2, Tolerances{}, tiny);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.count() == 56);  // 1 + 10 + 45
    CHECK(std::string(e.what()).find("56") != std::string::npos);
  }
  CHECK_THROWS_AS(build_support_family(builtin_matrix(), 6), InvalidInput);
}

TEST_CASE("noisy enumeration finds the complete minimizer list", "[enumeration]") {
  const Problem p(builtin_matrix(), builtin_noisy_data(), 100.0);
  const EnumerationResult res = enumerate_strict_minimizers(p, 5);
  CHECK(res.minimizers.size() == 638);
  const std::vector<std::size_t> expect{1, 10, 45, 120, 210, 252};
  for (std::size_t r = 0; r <= 5; ++r) CHECK(res.count_by_cardinality[r] == expect[r]);

  std::size_t full_card = 0;
  for (const auto& cm : res.minimizers) {
    CHECK(cm.is_strict);
    if (cm.support.size() == 5) {
      ++full_card;
      CHECK(cm.value == Approx(500.0).margin(1e-6));
    }
  }
  CHECK(full_card == 252);

  // sorted ascending, starting at the published optimum
  CHECK(res.minimizers.front().value == Approx(301.94).margin(5e-3));
  for (std::size_t i = 1; i < res.minimizers.size(); ++i)
    CHECK(res.minimizers[i - 1].value <= res.minimizers[i].value);

  // no duplicate supports
  std::map<Support, int> seen;
  for (const auto& cm : res.minimizers) seen[cm.support]++;
  for (const auto& [s, c] : seen) CHECK(c == 1);
}

TEST_CASE("noise-free enumeration collapses shrunk supports", "[enumeration]") {
  const Problem p(builtin_matrix(), builtin_clean_data(), 100.0);
  const EnumerationResult res = enumerate_strict_minimizers(p, 5);
  // six 5-supports contain the planted {2,3,5,10} and collapse onto it
  CHECK(res.minimizers.size() == 632);
  CHECK(res.count_by_cardinality[5] == 252 - 6);
  // at this beta the best trade drops the smallest planted entry
  CHECK(res.minimizers.front().support == Support({3, 5, 10}));
  CHECK(res.minimizers.front().value == Approx(301.52).margin(5e-3));
  // the planted support fits exactly, so its entry costs just the penalty
  bool planted_found = false;
  for (const auto& cm : res.minimizers)
    if (cm.support == Support({2, 3, 5, 10})) {
      planted_found = true;
      CHECK(cm.value == Approx(400.0).margin(1e-6));
      CHECK(cm.shrunk == false);
    }
  CHECK(planted_found);
}

TEST_CASE("huge beta puts the zero minimizer first", "[enumeration]") {
  const Problem p(builtin_matrix(), builtin_noisy_data(), 7e4);
  const EnumerationResult res = enumerate_strict_minimizers(p, 5);
  CHECK(res.minimizers.front().support.empty());
  CHECK(res.minimizers.front().value == Approx(60559.0).margin(1e-6));
}

TEST_CASE("enumeration equals the exhaustive subset oracle", "[enumeration]") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t m = (trial % 2) ? 3 : 2;
    const std::size_t n = (trial % 2) ? 6 : 4;
    const Matrix a = testutil::random_gaussian_matrix(rng, m, n);
    const Vector d = testutil::random_gaussian_vector(rng, m);
    const double beta = (trial % 3 == 0) ? 0.1 : (trial % 3 == 1) ? 1.0 : 10.0;
    const Problem p(a, d, beta);

    const auto oracle = brute_force_minimizers(a, d, beta);
    const EnumerationResult res = enumerate_strict_minimizers(p, m);
    REQUIRE(res.minimizers.size() == oracle.size());
    for (const auto& cm : res.minimizers) {
      const auto it = oracle.find(cm.support);
      REQUIRE(it != oracle.end());
      CHECK(cm.value == Approx(it->second.second).margin(1e-8 * (1.0 + cm.value)));
      for (std::size_t i = 0; i < n; ++i)
        CHECK(cm.u[i] == Approx(it->second.first[i]).margin(1e-8));
    }
    // the minimum-value entries agree
    double oracle_best = std::numeric_limits<double>::max();
    Support oracle_support;
    for (const auto& [s, uv] : oracle)
      if (uv.second < oracle_best) {
        oracle_best = uv.second;
        oracle_support = s;
      }
    CHECK(res.minimizers.front().support == oracle_support);
    CHECK(res.minimizers.front().value == Approx(oracle_best).margin(1e-9 * (1.0 + oracle_best)));
  }
}

TEST_CASE("generic instances have the full count of m-sparse minimizers", "[enumeration]") {
  for (std::uint64_t seed : {11u, 22u, 33u, 44u, 55u}) {
    std::mt19937_64 rng(seed);
    const Matrix a = testutil::random_gaussian_matrix(rng, 5, 10);
    const Vector d = testutil::random_gaussian_vector(rng, 5);
    const double beta = 0.5;
    const Problem p(a, d, beta);
    const EnumerationResult res = enumerate_strict_minimizers(p, 5);
    CHECK(res.count_by_cardinality[5] == 252);
    for (const auto& cm : res.minimizers)
      if (cm.support.size() == 5) CHECK(cm.value == Approx(beta * 5.0).margin(1e-8));
  }
}

TEST_CASE("enumeration is independent of the worker count", "[enumeration]") {
  const Problem p(builtin_matrix(), builtin_noisy_data(), 100.0);
  const EnumerationResult one = enumerate_strict_minimizers(p, 4, Tolerances{}, Budget{}, 1);
  const EnumerationResult three = enumerate_strict_minimizers(p, 4, Tolerances{}, Budget{}, 3);
  REQUIRE(one.minimizers.size() == three.minimizers.size());
  for (std::size_t i = 0; i < one.minimizers.size(); ++i) {
    CHECK(one.minimizers[i].support == three.minimizers[i].support);
    CHECK(one.minimizers[i].u == three.minimizers[i].u);
    CHECK(one.minimizers[i].value == three.minimizers[i].value);
  }
}

TEST_CASE("enumeration csv dataset", "[enumeration]") {
  const Problem p(builtin_matrix(), builtin_noisy_data(), 100.0);
  const EnumerationResult res = enumerate_strict_minimizers(p, 2);
  std::stringstream ss;
  write_enumeration_csv(ss, res);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "rank_in_sorted_order,support,cardinality,objective_value");
  std::string first;
  std::getline(ss, first);
  CHECK(first.substr(0, 2) == "1,");
  std::size_t lines = 1;  // the first data row
  std::string rest;
  while (std::getline(ss, rest))
    if (!rest.empty()) ++lines;
  CHECK(lines == res.minimizers.size());
}
