#include "gom/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gom/errors.hpp"
#include "gom/estimator.hpp"
#include "gom/evaluation.hpp"
#include "gom/identifiability.hpp"
#include "gom/io.hpp"
#include "gom/simulation.hpp"

#ifndef GOM_VERSION
#define GOM_VERSION "0.0.0"
#endif

namespace gom {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Row sums of membership CSVs written by other tools are checked loosely.
constexpr double kIngestRowSumTolerance = 1e-6;
constexpr double kProductIdentityTolerance = 1e-10;

struct CsvArgs {
  std::string delimiter = ",";
  bool header = false;

  io::CsvOptions options(io::ValueDomain d) const {
    if (delimiter.size() != 1) throw ConfigError("--delimiter must be a single character");
    return {delimiter[0], header, d};
  }
};

struct FitArgs {
  std::size_t k = 0;
  double epsilon = 0.001;
  std::optional<std::size_t> prune_r;
  double prune_q = 0.4;
  double prune_e = 0.2;
  bool no_prune = false;
  std::uint64_t seed = SvdOptions{}.seed;
};

struct Common {
  std::string out = ".";
  CsvArgs csv;
};

void add_csv_flags(CLI::App* cmd, CsvArgs& csv) {
  cmd->add_option("--delimiter", csv.delimiter, "Field separator of input CSVs")->capture_default_str();
  cmd->add_flag("--header", csv.header, "Input CSVs start with one header line to skip");
}

void add_fit_flags(CLI::App* cmd, FitArgs& f, bool k_required) {
  auto* k = cmd->add_option("--K", f.k, "Number of extreme profiles");
  if (k_required) k->required();
  cmd->add_option("--epsilon", f.epsilon, "Theta estimates are truncated to [eps, 1-eps]")
      ->capture_default_str();
  cmd->add_option("--prune-r", f.prune_r, "Neighbours used by pruning (default 10, capped at N-1)");
  cmd->add_option("--prune-q", f.prune_q, "Upper norm quantile forming the pruning candidates")
      ->capture_default_str();
  cmd->add_option("--prune-e", f.prune_e, "Upper distance quantile removed among candidates")
      ->capture_default_str();
  cmd->add_flag("--no-prune", f.no_prune, "Skip pruning before vertex hunting");
  cmd->add_option("--svd-seed", f.seed, "Seed of the randomized SVD backend")->capture_default_str();
}

FitConfig resolve_fit(const FitArgs& a, std::size_t n) {
  FitConfig cfg;
  cfg.k = a.k;
  cfg.epsilon = a.epsilon;
  cfg.prune_enabled = !a.no_prune;
  cfg.prune.q = a.prune_q;
  cfg.prune.e = a.prune_e;
  cfg.prune.r = a.prune_r ? *a.prune_r : std::min<std::size_t>(PruneConfig{}.r, n > 1 ? n - 1 : 1);
  cfg.svd.seed = a.seed;
  return cfg;
}

json fit_config_json(const FitConfig& c) {
  return {{"K", c.k},
          {"epsilon", c.epsilon},
          {"prune", {{"enabled", c.prune_enabled}, {"r", c.prune.r}, {"q", c.prune.q}, {"e", c.prune.e}}},
          {"svd",
           {{"gram_threshold", c.svd.gram_threshold},
            {"oversampling", c.svd.oversampling},
            {"min_power_iterations", c.svd.min_power_iterations},
            {"max_power_iterations", c.svd.max_power_iterations},
            {"tolerance", c.svd.tolerance},
            {"seed", c.svd.seed}}}};
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& idx) {
  std::vector<std::size_t> out(idx);
  for (auto& i : out) ++i;
  return out;
}

io::RunManifest start_manifest(const std::string& command, json config, std::uint64_t seed) {
  io::RunManifest m;
  m.tool_version = GOM_VERSION;
  m.command = command;
  m.config = std::move(config);
  m.seed = seed;
  m.started_at = io::utc_timestamp();
  return m;
}

json finish(io::RunManifest& m) {
  m.finished_at = io::utc_timestamp();
  return m.to_json();
}

void write_manifest(const fs::path& dir, io::RunManifest& m) {
  io::write_json(dir / "manifest.json", finish(m));
}

const char* backend_name(SvdBackend b) { return b == SvdBackend::kGram ? "gram" : "randomized"; }

// ---- fit -------------------------------------------------------------------

int cmd_fit(const std::string& input, bool probabilities, const FitArgs& args, const Common& c,
            std::ostream& out) {
  const auto domain = probabilities ? io::ValueDomain::kUnitInterval : io::ValueDomain::kBinary;
  const DenseMatrix data = io::read_matrix_csv(input, c.csv.options(domain));
  const FitConfig cfg = resolve_fit(args, data.rows());

  json config = fit_config_json(cfg);
  config["input"] = input;
  config["expect_probabilities"] = probabilities;
  config["delimiter"] = c.csv.delimiter;
  config["header"] = c.csv.header;
  io::RunManifest manifest = start_manifest("fit", config, cfg.svd.seed);
  manifest.input_sha256[input] = io::sha256_file(input);

  const FitResult res = fit(data, cfg);

  const fs::path dir(c.out);
  io::ensure_directory(dir);
  io::write_matrix_csv(dir / "pi_hat.csv", res.pi_hat.matrix());
  io::write_matrix_csv(dir / "theta_hat.csv", res.theta_hat.matrix());

  const auto& d = res.diagnostics;
  json dist = json::array();
  for (const auto& [row, v] : res.prune_report.avg_neighbor_dist)
    dist.push_back({{"subject", row + 1}, {"distance", v}});
  json fit_json = {
      {"N", data.rows()},
      {"J", data.cols()},
      {"K", cfg.k},
      {"s_hat", one_based(res.s_hat.indices)},
      {"singular_values", res.svd.sigma},
      {"prune",
       {{"enabled", cfg.prune_enabled},
        {"candidates", one_based(res.prune_report.candidates)},
        {"pruned", one_based(res.prune_report.pruned)},
        {"avg_neighbor_distance", dist}}},
      {"diagnostics",
       {{"svd_backend", backend_name(d.svd_backend)},
        {"sigma_next", d.sigma_next ? json(*d.sigma_next) : json(nullptr)},
        {"singular_gap", d.singular_gap},
        {"vertex_block_condition", d.vertex_block_condition},
        {"membership_gram_condition", d.membership_gram_condition},
        {"pi_entries_clamped", d.pi_entries_clamped},
        {"pi_degenerate_rows", one_based(d.pi_degenerate_rows)},
        {"theta_clamped_low", d.theta_clamped_low},
        {"theta_clamped_high", d.theta_clamped_high}}},
  };
  fit_json["manifest"] = finish(manifest);
  io::write_json(dir / "fit.json", fit_json);
  out << "fit: N=" << data.rows() << " J=" << data.cols() << " K=" << cfg.k << ", "
      << res.prune_report.pruned.size() << " rows pruned, wrote " << dir.string() << "\n";
  return kExitOk;
}

// ---- simulate --------------------------------------------------------------

struct SimArgs {
  std::size_t n = 200;
  std::size_t j = 0;
  std::size_t k = 3;
  std::uint64_t seed = 1;
  int case_id = 0;
  std::vector<double> alpha;
};

int cmd_simulate(const SimArgs& a, const Common& c, std::ostream& out) {
  const std::size_t j = a.j ? a.j : a.n / 5;
  SimConfig cfg;
  if (a.case_id != 0) {
    if (a.k != 3) throw ConfigError("--case fixtures have K=3");
    cfg = case_preset(a.case_id, a.n, j, a.seed);
  } else {
    cfg.n = a.n;
    cfg.j = j;
    cfg.k = a.k;
    cfg.seed = a.seed;
  }
  cfg.alpha = a.alpha;
  cfg.validate();

  json config = {{"N", cfg.n},
                 {"J", cfg.j},
                 {"K", cfg.k},
                 {"seed", cfg.seed},
                 {"case", a.case_id},
                 {"alpha", cfg.resolved_alpha()}};
  io::RunManifest manifest = start_manifest("simulate", config, cfg.seed);
  const SimOutput sim = generate(cfg);

  const fs::path dir(c.out);
  io::ensure_directory(dir);
  io::write_matrix_csv(dir / "pi_true.csv", sim.pi_true.matrix());
  io::write_matrix_csv(dir / "theta_true.csv", sim.theta_true.matrix());
  io::write_matrix_csv(dir / "R0.csv", sim.r0);
  io::write_matrix_csv(dir / "R.csv", sim.r.matrix());
  write_manifest(dir, manifest);
  out << "simulate: N=" << cfg.n << " J=" << cfg.j << " K=" << cfg.k << ", wrote " << dir.string()
      << "\n";
  return kExitOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvalArgs {
  std::string pi_hat, theta_hat, pi_true, theta_true, r;
};

int cmd_evaluate(const EvalArgs& a, const Common& c, std::ostream& out) {
  const auto unit = c.csv.options(io::ValueDomain::kUnitInterval);
  const DenseMatrix pi_hat = io::read_matrix_csv(a.pi_hat, unit);
  const DenseMatrix theta_hat = io::read_matrix_csv(a.theta_hat, unit);
  const DenseMatrix pi_true = io::read_matrix_csv(a.pi_true, unit);
  const DenseMatrix theta_true = io::read_matrix_csv(a.theta_true, unit);

  json config = {{"pi_hat", a.pi_hat},   {"theta_hat", a.theta_hat}, {"pi_true", a.pi_true},
                 {"theta_true", a.theta_true}, {"R", a.r.empty() ? json(nullptr) : json(a.r)}};
  io::RunManifest manifest = start_manifest("evaluate", config, 0);
  for (const auto& p : {a.pi_hat, a.theta_hat, a.pi_true, a.theta_true})
    manifest.input_sha256[p] = io::sha256_file(p);

  const AlignedComparison cmp = align(pi_hat, theta_hat, pi_true, theta_true);
  json eval = {{"K", pi_true.cols()},
               {"permutation", one_based(cmp.permutation)},
               {"mae_pi", cmp.mae_pi},
               {"mae_theta", cmp.mae_theta},
               {"warning", cmp.warning ? json(*cmp.warning) : json(nullptr)},
               {"reconstruction_error", nullptr}};
  if (!a.r.empty()) {
    const DenseMatrix r = io::read_matrix_csv(a.r, c.csv.options(io::ValueDomain::kBinary));
    manifest.input_sha256[a.r] = io::sha256_file(a.r);
    eval["reconstruction_error"] =
        reconstruction_error(MembershipMatrix(pi_hat, kIngestRowSumTolerance), ItemParamMatrix(theta_hat), r);
  }
  eval["manifest"] = finish(manifest);

  const fs::path dir(c.out);
  io::ensure_directory(dir);
  io::write_json(dir / "eval.json", eval);
  out << "evaluate: mae_pi=" << io::format_double(cmp.mae_pi)
      << " mae_theta=" << io::format_double(cmp.mae_theta) << "\n";
  return kExitOk;
}

// ---- diagnose --------------------------------------------------------------

struct DiagnoseArgs {
  std::string theta, pi;
  std::size_t k = 0;
  double tol = kDefaultRankTolerance;
  double pure_tol = 0.0;
  std::optional<double> alternative_eps;
};

json condition_json(const ConditionDiagnostics& d) {
  const auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"kappa_pi", finite_or_null(d.kappa_pi)},
          {"kappa_theta", finite_or_null(d.kappa_theta)},
          {"sigma_k_pi_over_sqrt_n", d.sigma_k_pi_over_sqrt_n},
          {"sigma_k_theta_over_sqrt_j", d.sigma_k_theta_over_sqrt_j},
          {"pi_rank_deficient", d.pi_rank_deficient},
          {"theta_rank_deficient", d.theta_rank_deficient},
          {"warnings", d.warnings}};
}

json matrix_json(const DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

int cmd_diagnose(const DiagnoseArgs& a, const Common& c, std::ostream& out) {
  const auto unit = c.csv.options(io::ValueDomain::kUnitInterval);
  const DenseMatrix theta = io::read_matrix_csv(a.theta, unit);
  if (theta.cols() != a.k) {
    throw DimensionError("Theta has " + std::to_string(theta.cols()) + " columns but --K is " +
                         std::to_string(a.k));
  }
  std::optional<MembershipMatrix> pi;
  if (!a.pi.empty()) pi.emplace(io::read_matrix_csv(a.pi, unit), kIngestRowSumTolerance);
  if (a.alternative_eps && !pi) throw ConfigError("--construct-alternative needs --pi");

  json config = {{"theta", a.theta},
                 {"pi", a.pi.empty() ? json(nullptr) : json(a.pi)},
                 {"K", a.k},
                 {"tol", a.tol},
                 {"pure_tol", a.pure_tol},
                 {"construct_alternative", a.alternative_eps ? json(*a.alternative_eps) : json(nullptr)}};
  io::RunManifest manifest = start_manifest("diagnose", config, 0);
  manifest.input_sha256[a.theta] = io::sha256_file(a.theta);
  if (pi) manifest.input_sha256[a.pi] = io::sha256_file(a.pi);

  const IdentifiabilityVerdict v = pi ? assess(theta, *pi, a.tol, a.pure_tol) : classify_theta(theta, a.k, a.tol);
  json verdict = {{"K", a.k},
                  {"verdict", to_string(v.verdict)},
                  {"rank_theta", v.rank_theta},
                  {"affine_flags", v.affine_flags},
                  {"pure_subjects", nullptr},
                  {"has_completely_mixed_subject", nullptr},
                  {"condition", nullptr},
                  {"alternative", nullptr}};
  if (pi) {
    json pure = json::array();
    for (const auto& p : v.pure_subject_indices) pure.push_back(p ? json(*p + 1) : json(nullptr));
    verdict["pure_subjects"] = pure;
    verdict["has_completely_mixed_subject"] = *v.has_completely_mixed_subject;
    verdict["condition"] = condition_json(condition_diagnostics(pi->matrix(), theta));
  }

  const fs::path dir(c.out);
  io::ensure_directory(dir);
  const auto write_verdict = [&] {
    verdict["manifest"] = finish(manifest);
    io::write_json(dir / "verdict.json", verdict);
  };
  if (!a.alternative_eps) {
    write_verdict();
    out << "diagnose: " << to_string(v.verdict) << "\n";
    return kExitOk;
  }

  AlternativeParameters alt;
  try {
    alt = construct_alternative(*pi, ItemParamMatrix(theta), *a.alternative_eps);
  } catch (const Error&) {
    write_verdict();
    throw;
  }
  const double diff =
      max_abs_diff(reconstruct(alt.pi, alt.theta), reconstruct(*pi, ItemParamMatrix(theta)));
  if (!(diff < kProductIdentityTolerance)) {
    write_verdict();
    throw ValidityError("alternative parameters change Pi*Theta^T by " + io::format_double(diff));
  }
  io::write_matrix_csv(dir / "pi_alt.csv", alt.pi.matrix());
  io::write_matrix_csv(dir / "theta_alt.csv", alt.theta.matrix());
  verdict["alternative"] = {{"eps", *a.alternative_eps},
                            {"M_eps", matrix_json(alt.transform)},
                            {"max_abs_product_diff", diff},
                            {"pi_file", "pi_alt.csv"},
                            {"theta_file", "theta_alt.csv"}};
  write_verdict();
  out << "diagnose: " << to_string(v.verdict) << ", alternative pair written\n";
  return kExitOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::vector<std::size_t> ns{200, 1000, 2000};
  std::vector<std::size_t> ks{3};
  std::size_t j_ratio = 5;
  std::size_t reps = 3;
  std::uint64_t seed = 1;
};

int cmd_bench(const BenchArgs& a, const FitArgs& f, const Common& c, std::ostream& out) {
  if (a.j_ratio == 0) throw ConfigError("--J-ratio must be positive");
  std::vector<SimConfig> grid;
  for (std::size_t k : a.ks) {
    for (std::size_t n : a.ns) {
      SimConfig cell;
      cell.n = n;
      cell.j = n / a.j_ratio;
      cell.k = k;
      cell.seed = a.seed;
      grid.push_back(cell);
    }
  }
  const std::size_t smallest = a.ns.empty() ? 2 : *std::min_element(a.ns.begin(), a.ns.end());
  FitArgs fa = f;
  fa.k = a.ks.empty() ? 1 : a.ks.front();
  const FitConfig fit_cfg = resolve_fit(fa, smallest);

  json config = fit_config_json(fit_cfg);
  config.erase("K");
  config["N"] = a.ns;
  config["K"] = a.ks;
  config["J_ratio"] = a.j_ratio;
  config["reps"] = a.reps;
  io::RunManifest manifest = start_manifest("bench", config, a.seed);

  const auto summaries = run_replications(grid, fit_cfg, {a.reps, false});

  const fs::path dir(c.out);
  io::ensure_directory(dir);
  std::ofstream csv(dir / "bench.csv");
  if (!csv) throw ConfigError("cannot write bench.csv");
  csv << "N,J,K,reps,failures,time_median_s,time_q25_s,time_q75_s,mae_theta_mean,mae_pi_mean\n";
  for (const auto& s : summaries) {
    csv << s.cell.n << ',' << s.cell.j << ',' << s.cell.k << ',' << a.reps << ',' << s.failures << ','
        << io::format_double(s.seconds.median) << ',' << io::format_double(s.seconds.q25) << ','
        << io::format_double(s.seconds.q75) << ',' << io::format_double(s.mae_theta.mean) << ','
        << io::format_double(s.mae_pi.mean) << '\n';
    out << "bench: N=" << s.cell.n << " K=" << s.cell.k << " median " << s.seconds.median
        << " s, mae_theta " << s.mae_theta.mean << ", mae_pi " << s.mae_pi.mean << "\n";
  }
  write_manifest(dir, manifest);
  return kExitOk;
}

// ---- ksweep ----------------------------------------------------------------

int cmd_ksweep(const std::string& input, const std::vector<std::size_t>& ks, const FitArgs& f,
               const Common& c, std::ostream& out) {
  const DenseMatrix r = io::read_matrix_csv(input, c.csv.options(io::ValueDomain::kBinary));
  FitArgs fa = f;
  fa.k = ks.empty() ? 1 : ks.front();
  const FitConfig cfg = resolve_fit(fa, r.rows());

  json config = fit_config_json(cfg);
  config["K"] = ks;
  config["input"] = input;
  io::RunManifest manifest = start_manifest("ksweep", config, cfg.svd.seed);
  manifest.input_sha256[input] = io::sha256_file(input);

  const auto sweep = k_sweep(r, ks, cfg);
  const auto best = best_k(sweep);
  json entries = json::array();
  for (const auto& e : sweep) {
    entries.push_back({{"K", e.k},
                       {"ok", e.ok},
                       {"reconstruction_error", e.ok ? json(e.error) : json(nullptr)},
                       {"message", e.message}});
    out << "ksweep: K=" << e.k << (e.ok ? " error " + io::format_double(e.error) : " failed: " + e.message)
        << "\n";
  }
  json result = {{"sweep", entries}, {"best_K", best ? json(*best) : json(nullptr)}};
  result["manifest"] = finish(manifest);

  const fs::path dir(c.out);
  io::ensure_directory(dir);
  io::write_json(dir / "ksweep.json", result);
  return kExitOk;
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case Error::Category::kInput:
      return kExitInput;
    case Error::Category::kNumeric:
      return kExitNumeric;
    case Error::Category::kPrecondition:
      return kExitPrecondition;
  }
  return kExitInput;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grade-of-Membership estimation by SVD and vertex hunting"};
  app.set_version_flag("--version", GOM_VERSION);
  app.require_subcommand(1);

  Common common;
  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", common.out, "Output directory")->capture_default_str();
    add_csv_flags(cmd, common.csv);
  };

  FitArgs fit_args;
  std::string fit_input;
  bool probabilities = false;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate Pi and Theta from a response matrix");
  fit_cmd->add_option("--input", fit_input, "N×J response CSV")->required();
  fit_cmd->add_flag("--expect-probabilities", probabilities,
                    "Input holds probabilities in [0, 1] rather than binary responses");
  add_fit_flags(fit_cmd, fit_args, true);
  add_common(fit_cmd);

  SimArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw synthetic parameters and responses");
  sim_cmd->add_option("--N", sim_args.n, "Subjects")->capture_default_str();
  sim_cmd->add_option("--J", sim_args.j, "Items (default N/5)");
  sim_cmd->add_option("--K", sim_args.k, "Profiles")->capture_default_str();
  sim_cmd->add_option("--seed", sim_args.seed, "Generator seed")->capture_default_str();
  sim_cmd->add_option("--case", sim_args.case_id, "Identifiability fixture 1, 2 or 3")
      ->check(CLI::Range(1, 3));
  sim_cmd->add_option("--alpha", sim_args.alpha, "Dirichlet parameters, comma separated")
      ->delimiter(',');
  add_common(sim_cmd);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Align estimates with the truth and report MAEs");
  eval_cmd->add_option("--pi-hat", eval_args.pi_hat, "Estimated Pi CSV")->required();
  eval_cmd->add_option("--theta-hat", eval_args.theta_hat, "Estimated Theta CSV")->required();
  eval_cmd->add_option("--pi-true", eval_args.pi_true, "True Pi CSV")->required();
  eval_cmd->add_option("--theta-true", eval_args.theta_true, "True Theta CSV")->required();
  eval_cmd->add_option("--R", eval_args.r, "Binary responses, for the reconstruction error");
  add_common(eval_cmd);

  DiagnoseArgs diag_args;
  auto* diag_cmd = app.add_subcommand("diagnose", "Classify identifiability of Theta (and Pi)");
  diag_cmd->add_option("--theta", diag_args.theta, "J×K Theta CSV")->required();
  diag_cmd->add_option("--K", diag_args.k, "Profiles")->required();
  diag_cmd->add_option("--pi", diag_args.pi, "N×K Pi CSV");
  diag_cmd->add_option("--tol", diag_args.tol, "Relative rank tolerance")->capture_default_str();
  diag_cmd->add_option("--pure-tol", diag_args.pure_tol, "Pure subject tolerance")->capture_default_str();
  diag_cmd->add_option("--construct-alternative", diag_args.alternative_eps,
                       "Emit a second parameter set with the same Pi*Theta^T using this eps");
  add_common(diag_cmd);

  BenchArgs bench_args;
  FitArgs bench_fit;
  auto* bench_cmd = app.add_subcommand("bench", "Time and score fits over a simulation grid");
  bench_cmd->add_option("--N", bench_args.ns, "Subject counts, comma separated")->delimiter(',');
  bench_cmd->add_option("--K", bench_args.ks, "Profile counts, comma separated")->delimiter(',');
  bench_cmd->add_option("--J-ratio", bench_args.j_ratio, "J = N / ratio")->capture_default_str();
  bench_cmd->add_option("--reps", bench_args.reps, "Replications per cell")->capture_default_str();
  bench_cmd->add_option("--seed", bench_args.seed, "Base seed")->capture_default_str();
  bench_cmd->add_option("--epsilon", bench_fit.epsilon, "Theta truncation")->capture_default_str();
  bench_cmd->add_option("--prune-r", bench_fit.prune_r, "Pruning neighbours");
  bench_cmd->add_option("--prune-q", bench_fit.prune_q, "Pruning norm quantile")->capture_default_str();
  bench_cmd->add_option("--prune-e", bench_fit.prune_e, "Pruning distance quantile")->capture_default_str();
  bench_cmd->add_flag("--no-prune", bench_fit.no_prune, "Skip pruning");
  add_common(bench_cmd);

  FitArgs sweep_fit;
  std::string sweep_input;
  std::vector<std::size_t> sweep_ks{2, 3, 4};
  auto* sweep_cmd = app.add_subcommand("ksweep", "Reconstruction error over candidate K");
  sweep_cmd->add_option("--input", sweep_input, "N×J response CSV")->required();
  sweep_cmd->add_option("--K", sweep_ks, "Candidate K values, comma separated")->delimiter(',');
  sweep_cmd->add_option("--epsilon", sweep_fit.epsilon, "Theta truncation")->capture_default_str();
  sweep_cmd->add_option("--prune-r", sweep_fit.prune_r, "Pruning neighbours");
  sweep_cmd->add_option("--prune-q", sweep_fit.prune_q, "Pruning norm quantile")->capture_default_str();
  sweep_cmd->add_option("--prune-e", sweep_fit.prune_e, "Pruning distance quantile")->capture_default_str();
  sweep_cmd->add_flag("--no-prune", sweep_fit.no_prune, "Skip pruning");
  add_common(sweep_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_input, probabilities, fit_args, common, out);
    if (*sim_cmd) return cmd_simulate(sim_args, common, out);
    if (*eval_cmd) return cmd_evaluate(eval_args, common, out);
    if (*diag_cmd) return cmd_diagnose(diag_args, common, out);
    if (*bench_cmd) return cmd_bench(bench_args, bench_fit, common, out);
    if (*sweep_cmd) return cmd_ksweep(sweep_input, sweep_ks, sweep_fit, common, out);
  } catch (const Error& e) {
    const auto* stage = dynamic_cast<const StageError*>(&e);
    err << "error";
    if (stage) err << " in stage " << stage->stage();
    err << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace gom
