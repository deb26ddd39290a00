// Command-line front end for the exact l0-penalized least-squares toolkit.
// Exit codes: 0 success, 2 invalid input, 3 combinatorial budget exceeded.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "l0lsq/l0lsq.hpp"

namespace {

using namespace l0lsq;

enum class Format { text, json, csv };

struct CommonOpts {
  Tolerances tol;
  Format format = Format::text;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--rank-tol", opts.tol.rank_tol, "relative rank tolerance")
      ->capture_default_str();
  cmd->add_option("--zero-tol", opts.tol.zero_tol, "absolute support-detection tolerance")
      ->capture_default_str();
  cmd->add_option("--cert-tol", opts.tol.cert_tol, "relative residual-certificate tolerance")
      ->capture_default_str();
  cmd->add_option("--format", opts.format, "output format")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Format>{
              {"text", Format::text}, {"json", Format::json}, {"csv", Format::csv}},
          CLI::ignore_case))
      ->capture_default_str();
}

struct InstanceOpts {
  std::string matrix_path, data_path, instance, noise_text;
};

void add_instance(CLI::App* cmd, InstanceOpts& opts, bool with_data) {
  cmd->add_option("--matrix", opts.matrix_path, "matrix file (csv or json)");
  if (with_data) cmd->add_option("--data", opts.data_path, "data vector file (csv or json)");
  cmd->add_option("--instance", opts.instance,
                  "built-in instance name instead of files (paper-5x10)");
  if (with_data)
    cmd->add_option("--noise", opts.noise_text, "explicit noise added to the data, e.g. 4,-1,2,-3,5");
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw InvalidInput("cannot parse number '" + tok + "'");
    }
  }
  return out;
}

ResolvedInstance load_instance(const InstanceOpts& opts) {
  if (opts.matrix_path.empty() && opts.instance.empty())
    throw InvalidInput("provide --matrix/--data files or --instance");
  ExperimentConfig cfg;
  cfg.instance = opts.instance;
  cfg.matrix_path = opts.matrix_path;
  cfg.data_path = opts.data_path;
  std::optional<NoiseSpec> noise;
  if (!opts.noise_text.empty()) {
    NoiseSpec spec;
    spec.vector = Vector(parse_number_list(opts.noise_text));
    noise = spec;
  }
  return resolve_instance(cfg, noise);
}

Support parse_support(const std::string& text) {
  if (text.empty() || text == "-" || text == "none") return Support{};
  std::vector<int> idx;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      idx.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw InvalidInput("cannot parse support index '" + tok + "'");
    }
  }
  std::sort(idx.begin(), idx.end());
  return Support(idx);
}

std::string support_field(const Support& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ";" : "") + std::to_string(s[i]);
  return out;
}

void print_minimizer_text(const CertifiedMinimizer& cm) {
  std::cout << "support    " << cm.support.to_string() << "\n";
  std::cout << "objective  " << format_double(cm.value) << "\n";
  std::cout << "strict     " << (cm.is_strict ? "yes" : "no") << "\n";
  std::cout << "shrunk     " << (cm.shrunk ? "yes" : "no") << "\n";
  std::cout << "u         ";
  for (double x : cm.u) std::cout << " " << format_double(x);
  std::cout << "\n";
}

void print_minimizer_csv(const CertifiedMinimizer& cm) {
  std::cout << "l0,objective,strict,shrunk,support";
  for (std::size_t j = 1; j <= cm.u.size(); ++j) std::cout << ",u" << j;
  std::cout << "\n"
            << cm.support.size() << ',' << format_double(cm.value) << ','
            << (cm.is_strict ? 1 : 0) << ',' << (cm.shrunk ? 1 : 0) << ','
            << support_field(cm.support);
  for (double x : cm.u) std::cout << ',' << format_double(x);
  std::cout << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"exact analysis of least squares with a counting penalty"};
  app.require_subcommand(1);

  CommonOpts opts;
  InstanceOpts inst_opts;
  std::string support_text, table, out_dir;
  std::string mode_text = "sharp", kind_text = "gaussian", scan_text = "exhaustive";
  double beta = 1.0;
  std::size_t k = 0;
  std::size_t count = 20, rows = 5, cols = 10;
  std::uint64_t seed = 0;

  auto* solve = app.add_subcommand("solve", "solve the support-restricted problem");
  add_instance(solve, inst_opts, true);
  solve->add_option("--support", support_text, "1-based indices, e.g. 3,5,10")->required();
  solve->add_option("--beta", beta, "penalty weight")->required();
  add_common(solve, opts);

  auto* enumerate = app.add_subcommand("enumerate", "list all strict local minimizers");
  add_instance(enumerate, inst_opts, true);
  enumerate->add_option("--k", k, "largest support cardinality (default: rows)");
  enumerate->add_option("--beta", beta)->required();
  add_common(enumerate, opts);

  auto* global = app.add_subcommand("global", "global minimizers with a uniqueness gap");
  add_instance(global, inst_opts, true);
  global->add_option("--k", k, "largest support cardinality (default: rows)");
  global->add_option("--beta", beta)->required();
  add_common(global, opts);

  auto* xi = app.add_subcommand("xi", "projector separation profile");
  add_instance(xi, inst_opts, false);
  xi->add_option("--k", k)->required();
  xi->add_option("--scan", scan_text, "pair scan: exhaustive or ring")->capture_default_str();
  add_common(xi, opts);

  auto* h1 = app.add_subcommand("h1", "check the projector separation assumption");
  add_instance(h1, inst_opts, false);
  h1->add_option("--k", k)->required();
  add_common(h1, opts);

  auto* betak = app.add_subcommand("beta-k", "penalty threshold for k-sparse global minimizers");
  add_instance(betak, inst_opts, true);
  betak->add_option("--k", k)->required();
  betak->add_option("--mode", mode_text, "loose or sharp")->capture_default_str();
  add_common(betak, opts);

  auto* sigma = app.add_subcommand("sigma-margin", "data-genericity margin");
  add_instance(sigma, inst_opts, true);
  sigma->add_option("--k", k)->required();
  sigma->add_option("--beta", beta)->required();
  add_common(sigma, opts);

  auto* repro = app.add_subcommand("reproduce", "run a canned experiment pipeline");
  repro->add_option("--table", table, "table3, table4, table5 or figure2")->required();
  repro->add_option("--out", out_dir, "output directory")->required();
  add_common(repro, opts);

  auto* ensemble = app.add_subcommand("ensemble", "seeded random-matrix ensemble statistics");
  ensemble->add_option("--kind", kind_text, "gaussian or uniform")->capture_default_str();
  ensemble->add_option("--count", count)->capture_default_str();
  ensemble->add_option("--seed", seed)->required();
  ensemble->add_option("--rows", rows)->capture_default_str();
  ensemble->add_option("--cols", cols)->capture_default_str();
  ensemble->add_option("--k", k, "profile depth (default: rows-1)");
  add_common(ensemble, opts);

  CLI11_PARSE(app, argc, argv);

  const auto emit = [&](const nlohmann::ordered_json& j) { std::cout << j.dump(2) << "\n"; };

  if (solve->parsed()) {
    const auto [a, d] = load_instance(inst_opts);
    const Problem p(a, d, beta);
    const CertifiedMinimizer cm = solve_restricted(p, parse_support(support_text), opts.tol);
    if (opts.format == Format::json)
      emit(to_json(cm));
    else if (opts.format == Format::csv)
      print_minimizer_csv(cm);
    else
      print_minimizer_text(cm);
    return 0;
  }

  if (enumerate->parsed()) {
    const auto [a, d] = load_instance(inst_opts);
    const Problem p(a, d, beta);
    const std::size_t k_max = k ? k : p.m();
    const EnumerationResult res = enumerate_strict_minimizers(p, k_max, opts.tol);
    if (opts.format == Format::csv) {
      write_enumeration_csv(std::cout, res);
    } else if (opts.format == Format::json) {
      nlohmann::ordered_json j;
      j["count"] = res.minimizers.size();
      j["count_by_cardinality"] = res.count_by_cardinality;
      j["minimizers"] = nlohmann::ordered_json::array();
      for (const auto& cm : res.minimizers) j["minimizers"].push_back(to_json(cm));
      emit(j);
    } else {
      std::cout << "distinct strict local minimizers: " << res.minimizers.size() << "\n";
      std::cout << "count by cardinality:";
      for (std::size_t r = 0; r < res.count_by_cardinality.size(); ++r)
        std::cout << " " << r << ":" << res.count_by_cardinality[r];
      std::cout << "\nbest: " << res.minimizers.front().support.to_string() << " at "
                << format_double(res.minimizers.front().value) << "\n";
    }
    return 0;
  }

  if (global->parsed()) {
    const auto [a, d] = load_instance(inst_opts);
    const Problem p(a, d, beta);
    const std::size_t k_max = k ? k : p.m();
    const GlobalReport g = global_minimizers(p, k_max, opts.tol);
    if (opts.format == Format::json) {
      emit(to_json(g));
    } else if (opts.format == Format::csv) {
      for (const auto& cm : g.minimizers) print_minimizer_csv(cm);
    } else {
      for (const auto& cm : g.minimizers) print_minimizer_text(cm);
      std::cout << "gap        " << format_double(g.uniqueness_gap) << "\n";
    }
    return 0;
  }

  if (xi->parsed()) {
    const Matrix a = load_instance(inst_opts).a;
    const PairScan scan = [&] {
      if (scan_text == "exhaustive") return PairScan::exhaustive;
      if (scan_text == "ring") return PairScan::ring;
      throw InvalidInput("unknown scan '" + scan_text + "' (exhaustive or ring)");
    }();
    const MuProfile prof = mu_profile(a, k, scan, opts.tol);
    const auto xs = prof.xi();
    if (opts.format == Format::json) {
      nlohmann::ordered_json j;
      j["xi"] = xs;
      j["mu"] = prof.mu;
      j["scan"] = scan_text;
      emit(j);
    } else if (opts.format == Format::csv) {
      std::cout << "k,xi,mu\n";
      for (std::size_t r = 0; r < xs.size(); ++r)
        std::cout << r + 1 << ',' << format_double(xs[r]) << ',' << format_double(prof.mu[r])
                  << "\n";
    } else {
      for (std::size_t r = 0; r < xs.size(); ++r)
        std::cout << "k=" << r + 1 << "  xi=" << format_double(xs[r])
                  << "  mu=" << format_double(prof.mu[r]) << "\n";
    }
    return 0;
  }

  if (h1->parsed()) {
    const H1Report rep = h1_check(load_instance(inst_opts).a, k, opts.tol);
    if (opts.format == Format::json) {
      emit(to_json(rep));
    } else {
      std::cout << "separation holds for k=" << rep.k << ": " << (rep.holds ? "yes" : "no")
                << "\n";
      if (rep.witness)
        std::cout << "coincident pair: " << rep.witness->first.to_string() << " and "
                  << rep.witness->second.to_string() << "\n";
      for (std::size_t r = 0; r < rep.mu.size(); ++r)
        std::cout << "k=" << r + 1 << "  xi=" << format_double(rep.xi[r])
                  << "  mu=" << format_double(rep.mu[r]) << "\n";
    }
    return 0;
  }

  if (betak->parsed()) {
    const auto [a, d] = load_instance(inst_opts);
    const Problem p(a, d, 1.0);
    const BetaKMode mode = [&] {
      if (mode_text == "loose") return BetaKMode::loose;
      if (mode_text == "sharp") return BetaKMode::sharp;
      throw InvalidInput("unknown mode '" + mode_text + "' (loose or sharp)");
    }();
    const double value = beta_k(p, k, mode, opts.tol);
    if (opts.format == Format::json) {
      nlohmann::ordered_json j;
      j["beta_k"] = value;
      j["k"] = k;
      j["mode"] = mode_text;
      emit(j);
    } else {
      std::cout << "beta_" << k << " (" << mode_text << ") = " << format_double(value) << "\n";
    }
    return 0;
  }

  if (sigma->parsed()) {
    const auto [a, d] = load_instance(inst_opts);
    const Problem p(a, d, beta);
    const double margin = sigma_k_margin(p, k, opts.tol);
    if (opts.format == Format::json) {
      nlohmann::ordered_json j;
      j["sigma_margin"] = margin;
      j["k"] = k;
      j["beta"] = beta;
      emit(j);
    } else {
      std::cout << "sigma margin (k=" << k << ", beta=" << format_double(beta)
                << ") = " << format_double(margin) << "\n";
    }
    return 0;
  }

  if (repro->parsed()) {
    reproduce(table, out_dir, opts.tol);
    for (const char* name : {"report.txt", "data.csv", "report.json"})
      std::cout << "wrote " << (std::filesystem::path(out_dir) / name).string() << "\n";
    return 0;
  }

  if (ensemble->parsed()) {
    const EnsembleKind kind = [&] {
      if (kind_text == "gaussian") return EnsembleKind::gaussian;
      if (kind_text == "uniform") return EnsembleKind::uniform;
      throw InvalidInput("unknown kind '" + kind_text + "' (gaussian or uniform)");
    }();
    const auto matrices = random_ensemble(kind, count, rows, cols, seed);
    const std::size_t depth = k ? k : rows - 1;
    const EnsembleStats stats = ensemble_stats(matrices, depth, opts.tol);
    if (opts.format == Format::json) {
      emit(to_json(stats));
    } else if (opts.format == Format::csv) {
      std::cout << "k,xi_worst,xi_best\n";
      for (std::size_t r = 0; r < depth; ++r)
        std::cout << r + 1 << ',' << format_double(stats.xi_worst[r]) << ','
                  << format_double(stats.xi_best[r]) << "\n";
    } else {
      std::cout << "matrices: " << stats.count << "\n";
      for (std::size_t r = 0; r < depth; ++r)
        std::cout << "k=" << r + 1 << "  xi_worst=" << format_double(stats.xi_worst[r])
                  << "  xi_best=" << format_double(stats.xi_best[r]) << "\n";
      std::cout << "strict-chain violation rate: " << stats.chain_violation_rate << "\n";
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const l0lsq::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const l0lsq::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const l0lsq::Infeasible& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
