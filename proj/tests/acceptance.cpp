// Acceptance suite: every release criterion as one pass/fail line.
// Exit code is the number of failed criteria.

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "l0lsq/l0lsq.hpp"

using namespace l0lsq;

namespace {

struct Harness {
  int failures = 0;
  int index = 0;

  void run(const std::string& name, const std::function<void()>& body) {
    ++index;
    try {
      body();
      std::printf("PASS  %d  %s\n", index, name.c_str());
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL  %d  %s: %s\n", index, name.c_str(), e.what());
    }
  }
};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

void require_close(double got, double want, double tol, const std::string& what) {
  if (!(std::abs(got - want) <= tol))
    throw std::runtime_error(what + ": got " + std::to_string(got) + ", want " +
                             std::to_string(want) + " +- " + std::to_string(tol));
}

Vector add(const Vector& a, const Vector& b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

struct SweepExpectation {
  double beta;
  Support support;
  std::vector<double> nonzeros;  // printed values
  double objective;
  double objective_tol;  // half a unit of the printed precision
};

void check_sweep(const Matrix& a, const Vector& d, const std::vector<SweepExpectation>& rows) {
  for (const auto& row : rows) {
    const Problem p(a, d, row.beta);
    const GlobalReport g = global_minimizers(p, p.m());
    require(g.minimizers.size() == 1, "beta=" + std::to_string(row.beta) + ": expected a unique minimum-value entry");
    const CertifiedMinimizer& cm = g.minimizers.front();
    require(cm.support == row.support,
            "beta=" + std::to_string(row.beta) + ": support " + cm.support.to_string() +
                " != expected " + row.support.to_string());
    require_close(cm.value, row.objective, row.objective_tol,
                  "beta=" + std::to_string(row.beta) + " objective");
    for (std::size_t i = 0; i < row.nonzeros.size(); ++i) {
      const double got = cm.u[static_cast<std::size_t>(row.support[i]) - 1];
      require_close(got, row.nonzeros[i], 1e-2,
                    "beta=" + std::to_string(row.beta) + " entry " + std::to_string(row.support[i]));
    }
  }
}

// exhaustive subset oracle via SVD pseudoinverse solves
std::map<Support, std::pair<Vector, double>> subset_oracle(const Matrix& a, const Vector& d,
                                                           double beta) {
  const std::size_t n = a.cols(), m = a.rows();
  Eigen::MatrixXd ae(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) ae(i, j) = a(i, j);
  Eigen::VectorXd de(m);
  for (std::size_t i = 0; i < m; ++i) de(i) = d[i];

  std::map<Support, std::pair<Vector, double>> found;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) idx.push_back(static_cast<int>(j) + 1);
    Eigen::VectorXd ue = Eigen::VectorXd::Zero(n);
    if (!idx.empty()) {
      Eigen::MatrixXd sub(m, idx.size());
      for (std::size_t t = 0; t < idx.size(); ++t) sub.col(t) = ae.col(idx[t] - 1);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
      svd.setThreshold(1e-10);
      const Eigen::VectorXd v = svd.solve(de);
      for (std::size_t t = 0; t < idx.size(); ++t) ue(idx[t] - 1) = v(t);
    }
    Vector u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = ue(j);
    const Support sigma = support_of(u, 1e-9);
    const Eigen::VectorXd res = ae * ue - de;
    bool local = true;
    for (int i : sigma) local &= std::abs(ae.col(i - 1).dot(res)) <= 1e-8 * (1.0 + de.norm());
    if (!local) continue;
    Eigen::MatrixXd sig(m, sigma.size());
    for (std::size_t t = 0; t < sigma.size(); ++t) sig.col(t) = ae.col(sigma[t] - 1);
    if (sigma.size() > 0) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sig);
      const auto& s = svd.singularValues();
      std::size_t rank = 0;
      for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > 1e-10 * s(0)) ++rank;
      if (rank != sigma.size()) continue;
    }
    found.emplace(sigma, std::make_pair(u, res.squaredNorm() + beta * double(sigma.size())));
  }
  return found;
}

Matrix random_gaussian(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = g(rng);
  return m;
}

Vector random_gaussian_vec(std::mt19937_64& rng, std::size_t len) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(len);
  for (std::size_t i = 0; i < len; ++i) v[i] = g(rng);
  return v;
}

Support random_support(std::mt19937_64& rng, std::size_t n, std::size_t size) {
  std::vector<int> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<int>(i) + 1;
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<int> idx(pool.begin(), pool.begin() + static_cast<long>(size));
  std::sort(idx.begin(), idx.end());
  return Support(idx);
}

}  // namespace

int main() {
  Harness h;
  const BuiltinInstance inst = builtin_instance("paper-5x10");
  const Vector d_noisy = add(inst.d_clean, builtin_noise("paper-5x10"));

  h.run("separation table xi/mu values within 5e-4", [&] {
    const MuProfile ring = mu_profile(inst.a, 4, PairScan::ring);
    const auto xi = ring.xi();
    const std::vector<double> xi_expect{0.2737, 0.2737, 0.2008, 0.0564};
    const std::vector<double> mu_expect{0.2737, 0.2799, 0.2008, 0.0564};
    for (std::size_t r = 0; r < 4; ++r) {
      require_close(xi[r], xi_expect[r], 5e-4, "xi_" + std::to_string(r + 1));
      require_close(ring.mu[r], mu_expect[r], 5e-4, "mu_" + std::to_string(r + 1));
    }
  });

  h.run("noise-free beta sweep: supports, objectives, entries", [&] {
    check_sweep(inst.a, inst.d_clean,
                {{1.0, Support{2, 3, 5, 10}, {1, 8, 3, 9}, 4.0, 0.5},
                 {100.0, Support{3, 5, 10}, {8.12, 3.31, 9.33}, 301.52, 5e-3},
                 {1000.0, Support{6, 7}, {12.58, 20.28}, 2179.3, 5e-2},
                 {10000.0, Support{2}, {29.95}, 14144.0, 0.5},
                 {70000.0, Support{}, {}, 58864.0, 0.5}});
  });

  h.run("noisy beta sweep: snr, supports, objectives, entries", [&] {
    require_close(snr_db(inst.d_clean, d_noisy), 14.07, 0.01, "snr_db");
    check_sweep(inst.a, d_noisy,
                {{1.0, Support{2, 3, 4, 6}, {6.02, 2.66, 6.43, 6.85}, 4.0436, 5e-4},
                 {100.0, Support{3, 5, 10}, {8.23, 2.3, 9.71}, 301.94, 5e-3},
                 {1000.0, Support{3, 10}, {8.14, 10.25}, 2174.8, 5e-2},
                 {10000.0, Support{10}, {14.47}, 14473.0, 0.5},
                 {70000.0, Support{}, {}, 60559.0, 0.5}});
  });

  h.run("complete minimizer list: 638 total, 252 full-support at 500, unique optimum", [&] {
    const Problem p(inst.a, d_noisy, 100.0);
    require_close(objective(p, Vector(10)), 60559.0, 1e-6, "objective at zero");
    const EnumerationResult res = enumerate_strict_minimizers(p, 5);
    require(res.minimizers.size() == 638,
            "count " + std::to_string(res.minimizers.size()) + " != 638");
    std::size_t full = 0;
    for (const auto& cm : res.minimizers)
      if (cm.support.size() == 5) {
        ++full;
        require_close(cm.value, 500.0, 1e-6, "full-support value");
      }
    require(full == 252, "full-support count " + std::to_string(full) + " != 252");
    const double gap = res.minimizers[1].value - res.minimizers[0].value;
    require(gap > 0.0, "uniqueness gap is not positive");
  });

  h.run("enumeration equals the subset oracle on 50 seeded instances", [&] {
    std::mt19937_64 rng(4242);
    const double betas[3] = {0.1, 1.0, 10.0};
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix a = random_gaussian(rng, 3, 6);
      const Vector d = random_gaussian_vec(rng, 3);
      const double beta = betas[trial % 3];
      const Problem p(a, d, beta);
      const auto oracle = subset_oracle(a, d, beta);
      const EnumerationResult res = enumerate_strict_minimizers(p, 3);
      require(res.minimizers.size() == oracle.size(),
              "trial " + std::to_string(trial) + ": set sizes differ");
      for (const auto& cm : res.minimizers) {
        const auto it = oracle.find(cm.support);
        require(it != oracle.end(), "trial " + std::to_string(trial) + ": support missing");
        require_close(cm.value, it->second.second, 1e-8 * (1.0 + std::abs(cm.value)),
                      "trial " + std::to_string(trial) + " value");
      }
      // global minimizers agree
      double best = std::numeric_limits<double>::max();
      Support best_support;
      Vector best_u;
      for (const auto& [s, uv] : oracle)
        if (uv.second < best) {
          best = uv.second;
          best_support = s;
          best_u = uv.first;
        }
      require(res.minimizers.front().support == best_support,
              "trial " + std::to_string(trial) + ": global supports differ");
      for (std::size_t i = 0; i < 6; ++i)
        require_close(res.minimizers.front().u[i], best_u[i], 1e-8,
                      "trial " + std::to_string(trial) + " global entry");
    }
  });

  h.run("property suites: certificates, invariances, monotonicity", [&] {
    std::mt19937_64 rng(9090);

    // projector idempotence / symmetry
    int done = 0;
    while (done < 100) {
      const std::size_t rows = 3 + done % 4, cols = 1 + done % rows;
      const Matrix m = random_gaussian(rng, rows, cols);
      if (numerical_rank(m, 1e-10) != cols) continue;
      const Matrix p = projector(m);
      for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < rows; ++j) {
          double pij2 = 0.0;
          for (std::size_t t = 0; t < rows; ++t) pij2 += p(i, t) * p(t, j);
          require(std::abs(pij2 - p(i, j)) <= 1e-9, "projector idempotence");
          require(std::abs(p(i, j) - p(j, i)) <= 1e-9, "projector symmetry");
        }
      ++done;
    }

    // residual certificate and beta-independence for restricted solves
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix a = random_gaussian(rng, 3, 6);
      const Vector d = random_gaussian_vec(rng, 3);
      const Support omega = random_support(rng, 6, 1 + trial % 3);
      const CertifiedMinimizer cm = solve_restricted(Problem(a, d, 1.0), omega);
      const Matrix sub_m = submatrix(a, cm.support);
      const Vector r = sub(mat_vec(a, cm.u), d);
      for (std::size_t t = 0; t < cm.support.size(); ++t)
        require(std::abs(dot(sub_m.column(t), r)) <= 1e-8 * (1.0 + norm(d)),
                "normal-equation residual");
      const Vector u_small = solve_restricted(Problem(a, d, 0.01), omega).u;
      const Vector u_large = solve_restricted(Problem(a, d, 100.0), omega).u;
      require(u_small == cm.u && u_large == cm.u, "solution depends on beta");
    }

    // strictness vs perturbation, strict side
    int strict_done = 0;
    while (strict_done < 100) {
      const Matrix a = random_gaussian(rng, 3, 6);
      const Vector d = random_gaussian_vec(rng, 3);
      const Problem p(a, d, 0.5);
      const Support omega = random_support(rng, 6, 1 + strict_done % 3);
      if (numerical_rank(submatrix(a, omega), 1e-10) != omega.size()) continue;
      const CertifiedMinimizer cm = solve_restricted(p, omega);
      if (cm.support.empty()) continue;
      require(is_strict_minimizer(p, cm.u), "full-rank support must give a strict minimizer");
      double min_entry = std::numeric_limits<double>::max();
      for (int i : cm.support)
        min_entry = std::min(min_entry, std::abs(cm.u[static_cast<std::size_t>(i) - 1]));
      const Vector r = sub(mat_vec(a, cm.u), d);
      double atr1 = 0.0;
      for (std::size_t j = 0; j < 6; ++j) atr1 += std::abs(dot(a.column(j), r));
      const double eps = 0.5 * std::min(min_entry, p.beta / (2.0 * (atr1 + 1.0)));
      std::normal_distribution<double> g(0.0, 1.0);
      for (int probe = 0; probe < 25; ++probe) {
        Vector v(6);
        for (std::size_t i = 0; i < 6; ++i) v[i] = g(rng);
        const double nv = norm(v);
        Vector moved = cm.u;
        for (std::size_t i = 0; i < 6; ++i) moved[i] += eps * v[i] / nv;
        require(objective(p, moved) > cm.value, "strict minimizer admits a non-increasing move");
      }
      ++strict_done;
    }

    // strictness vs perturbation, engineered nonstrict side
    for (int trial = 0; trial < 100; ++trial) {
      Matrix a = random_gaussian(rng, 3, 6);
      for (std::size_t i = 0; i < 3; ++i) a(i, 1) = a(i, 0);
      const Vector d = random_gaussian_vec(rng, 3);
      const Problem p(a, d, 0.5);
      const CertifiedMinimizer cm = solve_restricted(p, Support{1, 2});
      if (cm.support != Support({1, 2})) continue;
      require(!cm.is_strict, "duplicate columns must give a nonstrict minimizer");
      const double eps = 0.25 * std::abs(cm.u[0]);
      Vector moved = cm.u;
      moved[0] += eps;
      moved[1] -= eps;
      require(std::abs(objective(p, moved) - cm.value) <= 1e-9 * (1.0 + cm.value),
              "kernel direction changed the value");
    }

    // necessary-condition margin on global minimizers; huge beta collapses to zero
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix a = random_gaussian(rng, 3, 6);
      const Vector d = random_gaussian_vec(rng, 3);
      const double beta = 0.05 + 0.4 * (trial % 5);
      const Problem p(a, d, beta);
      const GlobalReport g = global_minimizers(p, 3);
      for (const auto& cm : g.minimizers)
        require(necessary_condition_margin(p, cm.u) >= -1e-9, "necessary-condition margin");

      const Problem huge(a, d, norm_sq(d) * 1.001 + 1e-6);
      const GlobalReport gz = global_minimizers(huge, 3);
      require(gz.minimizers.size() == 1 && gz.minimizers.front().support.empty(),
              "beta above the data energy must give the zero minimizer");
    }

    // xi monotone nonincreasing
    for (int trial = 0; trial < 100; ++trial) {
      const Matrix a = random_gaussian(rng, 4, 8);
      const auto xi = mu_profile(a, 3).xi();
      for (std::size_t r = 1; r < xi.size(); ++r)
        require(xi[r - 1] >= xi[r], "xi must be nonincreasing");
    }

    // kernel-data invariance of the minimizer function
    int kernel_done = 0;
    while (kernel_done < 100) {
      const Matrix a = random_gaussian(rng, 4, 7);
      const Vector d = random_gaussian_vec(rng, 4);
      const Support omega = random_support(rng, 7, 1 + kernel_done % 3);
      if (numerical_rank(submatrix(a, omega), 1e-10) != omega.size()) continue;
      const MinimizerFunctionMatrix f = minimizer_function(Problem(a, d, 1.0), omega);
      const Matrix kernel = kernel_of_transpose(submatrix(a, omega));
      if (kernel.cols() == 0) continue;
      Vector shifted = d;
      for (std::size_t i = 0; i < 4; ++i) shifted[i] += 2.5 * kernel(i, 0);
      const Vector u1 = f.apply(d, 7), u2 = f.apply(shifted, 7);
      for (std::size_t i = 0; i < 7; ++i)
        require(std::abs(u1[i] - u2[i]) <= 1e-8, "kernel-shifted data changed the minimizer");
      ++kernel_done;
    }
  });

  h.run("sharp thresholds bound global sparsity on 20 seeded instances", [&] {
    std::mt19937_64 rng(5555);
    for (int instn = 0; instn < 20; ++instn) {
      const Matrix a = random_gaussian(rng, 4, 8);
      const Vector d = random_gaussian_vec(rng, 4);
      for (std::size_t k : {1u, 2u, 3u}) {
        const double bk = beta_k(Problem(a, d, 1.0), k, BetaKMode::sharp);
        const double beta = bk * 1.01 + 1e-6;
        const GlobalReport g = global_minimizers(Problem(a, d, beta), 4);
        for (const auto& cm : g.minimizers)
          require(cm.support.size() <= k,
                  "instance " + std::to_string(instn) + " k=" + std::to_string(k) +
                      ": global support too large");
      }
    }
  });

  h.run("seeded ensembles: separation holds, xi in (0,1], tie rate <= 10%", [&] {
    const auto gaussian = random_ensemble(EnsembleKind::gaussian, 20, 5, 10, 20240501);
    const auto uniform = random_ensemble(EnsembleKind::uniform, 100, 5, 10, 20240502);
    for (const auto* ens : {&gaussian, &uniform}) {
      for (const Matrix& a : *ens) {
        const H1Report rep = h1_check(a, 4);
        require(rep.holds, "separation must hold on the seeded ensembles");
        for (double x : rep.xi) require(x > 0.0 && x <= 1.0 + 1e-12, "xi out of (0,1]");
      }
      const EnsembleStats stats = ensemble_stats(*ens, 4);
      require(stats.chain_violation_rate <= 0.10, "chain-violation rate above 10%");
    }
  });

  std::printf("%d criteria, %d failed\n", h.index, h.failures);
  return h.failures;
}
