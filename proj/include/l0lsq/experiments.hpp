#pragma once

// End-to-end experiment pipelines: the built-in 5x10 instance, SNR, seeded
// random ensembles, and the table/figure reproduction runs. Every pipeline is
// deterministic: rerunning with the same configuration writes byte-identical
// files.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "l0lsq/enumeration.hpp"
#include "l0lsq/errors.hpp"
#include "l0lsq/global_analysis.hpp"
#include "l0lsq/io.hpp"
#include "l0lsq/minimizers.hpp"
#include "l0lsq/model.hpp"

namespace l0lsq {

struct BuiltinInstance {
  Matrix a;
  Vector ground_truth;  // the planted coefficient vector
  Vector d_clean;       // a * ground_truth
};

inline BuiltinInstance builtin_instance(const std::string& name) {
  if (name != "paper-5x10")
    throw InvalidInput("unknown built-in instance '" + name + "' (available: paper-5x10)");
  const Matrix a(5, 10,
                 {7, 2, 4, 9, 0, 3, 3, 6, 6, 7,  //
                  3, 4, 9, 3, 3, 9, 1, 3, 1, 5,  //
                  5, 4, 2, 4, 0, 7, 1, 9, 2, 9,  //
                  8, 4, 0, 9, 6, 0, 4, 2, 3, 7,  //
                  6, 3, 6, 5, 0, 9, 0, 0, 3, 8});
  const Vector truth{0, 1, 8, 0, 3, 0, 0, 0, 0, 9};
  return BuiltinInstance{a, truth, mat_vec(a, truth)};
}

inline Vector builtin_noise(const std::string& name) {
  if (name != "paper-5x10")
    throw InvalidInput("unknown built-in instance '" + name + "' (available: paper-5x10)");
  return Vector{4, -1, 2, -3, 5};
}

// 10 log10( mean-removed signal power / noise power ). Zero noise gives +inf,
// a constant clean signal gives -inf.
inline double snr_db(const Vector& clean, const Vector& noisy) {
  if (clean.size() != noisy.size()) throw InvalidInput("snr_db: length mismatch");
  double mean = 0.0;
  for (double x : clean) mean += x;
  mean /= static_cast<double>(clean.size());
  double signal = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    signal += (clean[i] - mean) * (clean[i] - mean);
    noise += (noisy[i] - clean[i]) * (noisy[i] - clean[i]);
  }
  if (noise == 0.0) return std::numeric_limits<double>::infinity();
  if (signal == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / noise);
}

enum class EnsembleKind { gaussian, uniform };

inline std::vector<Matrix> random_ensemble(EnsembleKind kind, std::size_t count, std::size_t rows,
                                           std::size_t cols, std::uint64_t seed) {
  if (count < 1) throw InvalidInput("random_ensemble: count must be >= 1");
  if (rows >= cols) throw InvalidInput("random_ensemble: shape must have rows < cols");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<Matrix> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        m(i, j) = (kind == EnsembleKind::gaussian) ? normal(rng) : uniform(rng);
    out.push_back(std::move(m));
  }
  return out;
}

// Noise for a data vector: an explicit vector, or a seeded generator.
struct NoiseSpec {
  std::optional<Vector> vector;
  std::string distribution = "gaussian";  // used when no explicit vector is given
  double amplitude = 1.0;
  std::uint64_t seed = 0;

  Vector realize(std::size_t m) const {
    if (vector) {
      if (vector->size() != m)
        throw InvalidInput("noise length " + std::to_string(vector->size()) +
                           " does not match data length " + std::to_string(m));
      return *vector;
    }
    std::mt19937_64 rng(seed);
    Vector out(m);
    if (distribution == "gaussian") {
      std::normal_distribution<double> g(0.0, amplitude);
      for (std::size_t i = 0; i < m; ++i) out[i] = g(rng);
    } else if (distribution == "uniform") {
      std::uniform_real_distribution<double> u(-amplitude, amplitude);
      for (std::size_t i = 0; i < m; ++i) out[i] = u(rng);
    } else {
      throw InvalidInput("unknown noise distribution '" + distribution + "'");
    }
    return out;
  }
};

struct ExperimentConfig {
  std::string instance = "paper-5x10";    // built-in name, or empty when paths are given
  std::filesystem::path matrix_path;      // overrides `instance` when nonempty
  std::filesystem::path data_path;
  std::vector<double> beta_list;
  std::size_t k = 4;
  std::uint64_t seed = 0;
  Tolerances tolerances;
  std::filesystem::path output;
};

// The matrix and data a configuration points at: explicit files win, the
// built-in instance otherwise; optional noise is added on top.
struct ResolvedInstance {
  Matrix a;
  Vector d;
};

inline ResolvedInstance resolve_instance(const ExperimentConfig& cfg,
                                         const std::optional<NoiseSpec>& noise = {}) {
  ResolvedInstance out;
  if (!cfg.matrix_path.empty()) {
    out.a = read_matrix_file(cfg.matrix_path);
    if (cfg.data_path.empty())
      throw InvalidInput("a matrix file was given without a data file");
    out.d = read_vector_file(cfg.data_path);
  } else {
    const BuiltinInstance built = builtin_instance(cfg.instance);
    out.a = built.a;
    out.d = built.d_clean;
  }
  if (noise) {
    const Vector n = noise->realize(out.d.size());
    for (std::size_t i = 0; i < out.d.size(); ++i) out.d[i] = out.d[i] + n[i];
  }
  return out;
}

namespace detail {

inline std::string fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
  return buf;
}

inline std::string compact_value(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

inline std::ofstream open_report(const std::filesystem::path& dir, const char* name) {
  std::ofstream out(dir / name);
  if (!out) throw InvalidInput("cannot write " + (dir / name).string());
  return out;
}

struct SweepRow {
  double beta;
  CertifiedMinimizer best;
  double gap;
};

inline std::vector<SweepRow> beta_sweep(const Matrix& a, const Vector& d,
                                        const std::vector<double>& betas, const Tolerances& tol) {
  std::vector<SweepRow> rows;
  for (double beta : betas) {
    const Problem p(a, d, beta);
    const GlobalReport g = global_minimizers(p, p.m(), tol);
    rows.push_back(SweepRow{beta, g.minimizers.front(), g.uniqueness_gap});
  }
  return rows;
}

inline void write_sweep_reports(const std::filesystem::path& dir, const std::string& table,
                                const std::vector<SweepRow>& rows, std::optional<double> snr) {
  auto txt = open_report(dir, "report.txt");
  txt << "global minimizer per beta (built-in 5x10 instance, "
      << (snr ? "noisy data" : "noise-free data") << ")\n";
  if (snr) txt << "snr_db = " << fixed(*snr, 2) << "\n";
  txt << "\n  beta      u-hat (nonzero entries as index:value)      l0    F\n";
  for (const auto& row : rows) {
    txt << "  " << compact_value(row.beta) << "\t";
    if (row.best.support.empty()) txt << "0 (all entries zero)";
    for (int i : row.best.support)
      txt << i << ":" << fixed(row.best.u[static_cast<std::size_t>(i) - 1], 2) << " ";
    txt << "\t" << row.best.support.size() << "\t" << compact_value(row.best.value) << "\n";
  }

  auto csv = open_report(dir, "data.csv");
  const std::size_t n = rows.front().best.u.size();
  csv << "beta,l0,objective,gap,support";
  for (std::size_t j = 1; j <= n; ++j) csv << ",u" << j;
  csv << "\n";
  for (const auto& row : rows) {
    csv << format_double(row.beta) << ',' << row.best.support.size() << ','
        << format_double(row.best.value) << ',' << format_double(row.gap) << ',';
    for (std::size_t i = 0; i < row.best.support.size(); ++i)
      csv << (i ? ";" : "") << row.best.support[i];
    for (std::size_t j = 0; j < n; ++j) csv << ',' << format_double(row.best.u[j]);
    csv << "\n";
  }

  nlohmann::ordered_json j;
  j["table"] = table;
  if (snr) j["snr_db"] = *snr;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json e = to_json(row.best);
    e.erase("strict");
    e.erase("shrunk");
    nlohmann::ordered_json full;
    full["beta"] = row.beta;
    full.update(e);
    full["gap"] = row.gap;
    j["rows"].push_back(full);
  }
  auto js = open_report(dir, "report.json");
  js << j.dump(2) << "\n";
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation("reproduction self-check failed: " + what);
}

}  // namespace detail

// Run one of the canned pipelines and write report.txt, data.csv and
// report.json into `out`. Valid names: table3, table4, table5, figure2.
inline void reproduce(const std::string& table, const std::filesystem::path& out,
                      const Tolerances& tol = {}) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw InvalidInput("cannot create output directory " + out.string() + ": " + ec.message());

  const BuiltinInstance inst = builtin_instance("paper-5x10");
  const Vector noise = builtin_noise("paper-5x10");
  Vector d_noisy(inst.d_clean.size());
  for (std::size_t i = 0; i < d_noisy.size(); ++i) d_noisy[i] = inst.d_clean[i] + noise[i];

  if (table == "table3") {
    const std::size_t k = inst.a.rows() - 1;
    // The published table tracks the ring scan (adjacent supports in colex
    // order); the exhaustive all-pairs minima go alongside it.
    const MuProfile ring = mu_profile(inst.a, k, PairScan::ring, tol);
    const H1Report h1 = h1_check(inst.a, k, tol);
    const auto ring_xi = ring.xi();

    auto txt = detail::open_report(out, "report.txt");
    txt << "projector separation for the built-in 5x10 instance\n\n";
    txt << "ring scan (colex-adjacent support pairs, cyclic):\n  k   ";
    for (std::size_t r = 1; r <= k; ++r) txt << "      " << r;
    txt << "\n  xi  ";
    for (double v : ring_xi) txt << " " << detail::fixed(v, 4);
    txt << "\n  mu  ";
    for (double v : ring.mu) txt << " " << detail::fixed(v, 4);
    txt << "\n\nexhaustive all-pairs minima:\n  xi  ";
    for (double v : h1.xi) txt << " " << detail::fixed(v, 4);
    txt << "\n  mu  ";
    for (double v : h1.mu) txt << " " << detail::fixed(v, 4);
    txt << "\n\nseparation holds for k=" << k << ": " << (h1.holds ? "yes" : "no") << "\n";

    auto csv = detail::open_report(out, "data.csv");
    csv << "k,xi,mu,xi_exhaustive,mu_exhaustive\n";
    for (std::size_t r = 1; r <= k; ++r)
      csv << r << ',' << format_double(ring_xi[r - 1]) << ',' << format_double(ring.mu[r - 1])
          << ',' << format_double(h1.xi[r - 1]) << ',' << format_double(h1.mu[r - 1]) << "\n";

    nlohmann::ordered_json j;
    j["table"] = "table3";
    j["xi"] = ring_xi;
    j["mu"] = ring.mu;
    j["xi_exhaustive"] = h1.xi;
    j["mu_exhaustive"] = h1.mu;
    j["h1"] = h1.holds;
    j["witness"] = nullptr;
    auto js = detail::open_report(out, "report.json");
    js << j.dump(2) << "\n";
    return;
  }

  const std::vector<double> betas{1, 100, 1000, 10000, 70000};
  const Support truth_support = support_of(inst.ground_truth, tol.zero_tol);

  if (table == "table4") {
    const auto rows = detail::beta_sweep(inst.a, inst.d_clean, betas, tol);
    for (const auto& row : rows)
      if (row.beta == 100 || row.beta == 10000)
        detail::require(row.best.support.subset_of(truth_support),
                        "noise-free global support at beta=" + detail::compact_value(row.beta) +
                            " is not contained in the planted support");
    detail::write_sweep_reports(out, "table4", rows, std::nullopt);
    return;
  }

  if (table == "table5") {
    const double snr = snr_db(inst.d_clean, d_noisy);
    detail::require(std::abs(snr - 14.07) <= 0.01, "snr is not 14.07 +- 0.01 dB");
    const auto rows = detail::beta_sweep(inst.a, d_noisy, betas, tol);
    for (const auto& row : rows)
      if (row.beta == 100 || row.beta == 1000 || row.beta == 10000)
        detail::require(row.best.support.subset_of(truth_support),
                        "noisy global support at beta=" + detail::compact_value(row.beta) +
                            " is not contained in the planted support");
    detail::write_sweep_reports(out, "table5", rows, snr);
    return;
  }

  if (table == "figure2") {
    const Problem p(inst.a, d_noisy, 100.0);
    detail::require(std::abs(objective(p, Vector(p.n()), tol.zero_tol) - norm_sq(p.d)) <=
                        1e-9 * (1.0 + norm_sq(p.d)),
                    "objective at zero does not equal ||d||^2");
    const EnumerationResult res = enumerate_strict_minimizers(p, p.m(), tol);

    auto csv = detail::open_report(out, "data.csv");
    write_enumeration_csv(csv, res);

    const auto& best = res.minimizers.front();
    const double gap = res.minimizers[1].value - best.value;
    auto txt = detail::open_report(out, "report.txt");
    txt << "all strict local minimizers, built-in 5x10 instance, noisy data, beta=100\n\n";
    txt << "distinct minimizers: " << res.minimizers.size() << "\n";
    txt << "count by cardinality:";
    for (std::size_t r = 0; r < res.count_by_cardinality.size(); ++r)
      txt << " " << r << ":" << res.count_by_cardinality[r];
    txt << "\nobjective at zero: " << detail::compact_value(norm_sq(p.d)) << "\n";
    txt << "best: support " << best.support.to_string() << ", objective "
        << detail::compact_value(best.value) << ", gap to runner-up " << detail::compact_value(gap)
        << "\n";

    nlohmann::ordered_json j;
    j["table"] = "figure2";
    j["count"] = res.minimizers.size();
    j["count_by_cardinality"] = res.count_by_cardinality;
    j["f_zero"] = norm_sq(p.d);
    j["best"] = to_json(best);
    j["gap"] = gap;
    auto js = detail::open_report(out, "report.json");
    js << j.dump(2) << "\n";
    return;
  }

  throw InvalidInput("unknown table '" + table + "' (available: table3, table4, table5, figure2)");
}

}  // namespace l0lsq
