#include "spikeslab/cli/commands.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "spikeslab/benchmark_runner.hpp"
#include "spikeslab/cli/config.hpp"
#include "spikeslab/cli/io.hpp"
#include "spikeslab/cli/manifest.hpp"
#include "spikeslab/error.hpp"
#include "spikeslab/format.hpp"
#include "spikeslab/gls.hpp"
#include "spikeslab/ppca.hpp"

#ifndef SPIKESLAB_VERSION
#define SPIKESLAB_VERSION "unknown"
#endif

namespace spikeslab::cli {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::string out = "out";
  int replicates = 0;
  std::string scheme;
  double sigma0 = 0.0;
  std::string preset;
  bool no_timing = false;
  unsigned threads = 0;
  // Subcommand-specific flags, merged after everything else.
  Json flag_overrides = Json::object();

  CLI::Option* seed_opt = nullptr;
  CLI::Option* replicates_opt = nullptr;
  CLI::Option* scheme_opt = nullptr;
  CLI::Option* sigma0_opt = nullptr;
  CLI::Option* preset_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--config", a.config, "JSON config file")->check(CLI::ExistingFile);
  a.seed_opt = cmd->add_option("--seed", a.seed, "RNG seed");
  cmd->add_option("--out", a.out, "Output directory")->capture_default_str();
  a.replicates_opt = cmd->add_option("--replicates", a.replicates, "Replicate count")
                         ->check(CLI::PositiveNumber);
  a.scheme_opt = cmd->add_option("--scheme", a.scheme, "Variational scheme")
                     ->check(CLI::IsMember({"sparse", "naive"}));
  a.sigma0_opt = cmd->add_option("--sigma0", a.sigma0, "Naive spike variance");
  a.preset_opt = cmd->add_option("--preset", a.preset, "Preset")
                     ->check(CLI::IsMember({"smoke", "paper"}));
  cmd->add_flag("--no-timing", a.no_timing, "Write elapsed_ms as 0");
  cmd->add_option("--threads", a.threads, "Worker threads (0 = hardware)");
}

// Flags that a subcommand cannot use are rejected rather than ignored.
void reject(const CLI::Option* opt, const std::string& command) {
  if (opt->count() > 0) {
    throw InvalidArgument(opt->get_name() + " does not apply to " + command);
  }
}

// Input files named in a config file are relative to that file.
void anchor_paths(Json& file_config, const fs::path& config_path) {
  for (const char* key : {"beta_hat", "corr", "data"}) {
    auto it = file_config.find(key);
    if (it == file_config.end() || !it->is_string()) continue;
    const fs::path value(it->get<std::string>());
    if (value.is_relative()) *it = (config_path.parent_path() / value).lexically_normal().string();
  }
}

// preset, then config file, then flags.
Json resolve(const std::string& command, Json defaults, const CommonArgs& a) {
  if (a.preset_opt->count() > 0) merge_into(defaults, preset(command, a.preset));
  if (!a.config.empty()) {
    Json file_config = load_config_file(a.config);
    anchor_paths(file_config, a.config);
    merge_into(defaults, file_config);
  }
  if (a.seed_opt->count() > 0) defaults["seed"] = a.seed;
  merge_into(defaults, a.flag_overrides);
  return defaults;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw InvalidArgument("--out: cannot create " + dir);
  return p;
}

RunManifest begin_manifest(const std::string& command, const Json& resolved) {
  RunManifest m;
  m.command = command;
  m.config = resolved;
  m.config_digest = sha256_hex(canonical_config(resolved));
  m.seed = resolved.value("seed", std::uint64_t{0});
  m.version = SPIKESLAB_VERSION;
  m.started_utc = utc_now();
  return m;
}

void finish_manifest(const fs::path& out, RunManifest& m) {
  m.finished_utc = utc_now();
  write_manifest(out / "manifest.json", m);
}

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_elbo(const fs::path& path, const std::vector<double>& trace) {
  CsvWriter w(path);
  w.row({"sweep", "elbo"});
  for (std::size_t i = 0; i < trace.size(); ++i) {
    w.row({std::to_string(i + 1), csv_number(trace[i])});
  }
  w.flush();
}

int cmd_fit_gls(const CommonArgs& a, std::ostream& out) {
  reject(a.replicates_opt, "fit-gls");
  Json resolved = resolve("fit-gls", to_json(FitGlsConfig{}), a);
  if (a.scheme_opt->count() > 0) resolved["scheme"] = a.scheme;
  if (a.sigma0_opt->count() > 0) resolved["sigma0"] = a.sigma0;
  const FitGlsConfig c = fit_gls_config(resolved);
  const fs::path dir = prepare_out(a.out);
  RunManifest manifest = begin_manifest("fit-gls", resolved);

  const GlsProblem problem(read_vector(c.beta_hat), read_matrix_csv(c.corr), c.sigma_e2,
                           c.sigma_1_2, c.p0);
  const GlsFitOptions options{c.sweeps, c.tol};
  FitReport report;
  if (c.scheme == "sparse") {
    report = fit_gls_sparse(problem, options);
  } else if (c.init == "best") {
    report = fit_gls_naive_best(problem, c.sigma0, options);
  } else {
    report = fit_gls_naive(problem, c.sigma0, options, c.init == "slab" ? Init::Slab : Init::Spike);
  }

  const GlsPosterior& q = report.posterior;
  const Eigen::VectorXd mean = q.posterior_mean();
  CsvWriter w(dir / "posterior.csv");
  w.row({"index", "psi", "mu", "s2", "post_mean"});
  for (Eigen::Index i = 0; i < problem.dim(); ++i) {
    w.row({std::to_string(i), csv_number(q.psi(i)), csv_number(q.mu(i)), csv_number(q.s2(i)),
           csv_number(mean(i))});
  }
  w.flush();
  write_elbo(dir / "elbo.csv", report.elbo_trace);
  finish_manifest(dir, manifest);

  out << "fit-gls: " << scheme_name(q.scheme) << " P=" << problem.dim()
      << " sweeps=" << report.sweeps << " converged=" << (report.converged ? "yes" : "no")
      << " elbo=" << format_double(report.elbo_trace.back()) << '\n';
  return kExitOk;
}

int cmd_fit_ppca(const CommonArgs& a, std::ostream& out) {
  reject(a.replicates_opt, "fit-ppca");
  Json resolved = resolve("fit-ppca", to_json(FitPpcaConfig{}), a);
  if (a.scheme_opt->count() > 0) resolved["scheme"] = a.scheme;
  if (a.sigma0_opt->count() > 0) resolved["sigma0"] = a.sigma0;
  const FitPpcaConfig c = fit_ppca_config(resolved);
  const fs::path dir = prepare_out(a.out);
  RunManifest manifest = begin_manifest("fit-ppca", resolved);

  const PpcaProblem problem(read_matrix_csv(c.data), c.k, c.sigma_e2, c.sigma_1_2, c.p0);
  const PpcaFitOptions options{c.sweeps, std::nullopt};
  const PpcaFit fit = c.scheme == "sparse" ? fit_ppca_sparse(problem, options)
                                           : fit_ppca_naive(problem, c.sigma0, options);
  const PpcaPosterior& q = fit.posterior;
  const Eigen::MatrixXd mean = q.expected_w();

  CsvWriter loadings(dir / "loadings.csv");
  loadings.row({"index", "component", "psi", "mu", "s2", "post_mean"});
  for (Eigen::Index p = 0; p < problem.p(); ++p) {
    for (int k = 0; k < problem.k(); ++k) {
      loadings.row({std::to_string(p), std::to_string(k + 1), csv_number(q.psi_w(p, k)),
                    csv_number(q.mu_w(p, k)), csv_number(q.s2_w(p, k)), csv_number(mean(p, k))});
    }
  }
  loadings.flush();

  CsvWriter scores(dir / "scores.csv");
  std::vector<std::string> header{"index"};
  for (int k = 0; k < problem.k(); ++k) header.push_back("pc" + std::to_string(k + 1));
  scores.row(header);
  for (Eigen::Index n = 0; n < problem.n(); ++n) {
    std::vector<std::string> row{std::to_string(n)};
    for (int k = 0; k < problem.k(); ++k) row.push_back(csv_number(q.mu_z(n, k)));
    scores.row(row);
  }
  scores.flush();
  write_elbo(dir / "elbo.csv", fit.elbo_trace);
  finish_manifest(dir, manifest);

  out << "fit-ppca: " << scheme_name(q.scheme) << " N=" << problem.n() << " P=" << problem.p()
      << " K=" << problem.k() << " sweeps=" << fit.sweeps
      << " elbo=" << format_double(fit.elbo_trace.back()) << '\n';
  return kExitOk;
}

// Bench configs carry a "scheme" key ("all", "sparse" or "naive") next to
// the simulation fields; it is split off before the strict read.
std::string take_scheme(Json& resolved) {
  std::string scheme = "all";
  if (auto it = resolved.find("scheme"); it != resolved.end()) {
    if (!it->is_string()) throw InvalidArgument("config key 'scheme': expected a string");
    scheme = it->get<std::string>();
    resolved.erase(it);
  }
  if (scheme != "all" && scheme != "sparse" && scheme != "naive") {
    throw InvalidArgument("scheme: expected 'all', 'sparse' or 'naive'");
  }
  return scheme;
}

sim::RunOptions run_options(const CommonArgs& a, const std::string& scheme) {
  sim::RunOptions o;
  o.threads = thread_count(a.threads);
  o.cancel = &interrupt_flag();
  o.record_timing = !a.no_timing;
  o.include_sparse = scheme != "naive";
  o.include_naive = scheme != "sparse";
  return o;
}

void write_summary(const fs::path& path, const std::vector<sim::BenchmarkRecord>& records) {
  CsvWriter w(path);
  w.row({"method", "sigma_e2", "metric", "count", "mean", "q25", "q75"});
  for (const auto& s : sim::summarize(records)) {
    w.row({s.method, csv_number(s.sigma_e2), s.metric, std::to_string(s.count), csv_number(s.mean),
           csv_number(s.q25), csv_number(s.q75)});
  }
  w.flush();
}

int finish_bench(const fs::path& dir, const sim::BenchmarkResult& result, CsvWriter& records,
                 RunManifest& manifest, std::ostream& out) {
  if (result.truncated) {
    records.comment("TRUNCATED");
    manifest.status = "truncated";
  }
  records.flush();
  write_summary(dir / "summary.csv", result.records);
  finish_manifest(dir, manifest);
  out << manifest.command << ": " << result.records.size() << " records"
      << (result.truncated ? " (interrupted)" : "") << " -> " << dir.string() << '\n';
  return result.truncated ? kExitInterrupted : kExitOk;
}

void apply_bench_flags(Json& resolved, const CommonArgs& a, const char* sigma0_grid_key) {
  if (a.replicates_opt->count() > 0) resolved["replicates"] = a.replicates;
  if (a.scheme_opt->count() > 0) resolved["scheme"] = a.scheme;
  if (a.sigma0_opt->count() > 0) resolved[sigma0_grid_key] = Json::array({a.sigma0});
}

int cmd_bench_gls(const CommonArgs& a, std::ostream& out) {
  Json resolved = resolve("bench-gls", to_json(sim::GlsSimConfig{}), a);
  apply_bench_flags(resolved, a, "naive_sigma0_grid");
  Json sim_json = resolved;
  const std::string scheme = take_scheme(sim_json);
  const sim::GlsSimConfig config = gls_sim_config(sim_json);
  const fs::path dir = prepare_out(a.out);
  RunManifest manifest = begin_manifest("bench-gls", resolved);

  const sim::BenchmarkResult result = sim::run_gls_benchmark(config, run_options(a, scheme));
  CsvWriter w(dir / "records.csv");
  w.row({"replicate", "method", "sigma_e2", "mse", "correlation", "elapsed_ms", "error"});
  for (const auto& r : result.records) {
    w.row({std::to_string(r.replicate), r.method, csv_number(r.sigma_e2), csv_number(r.mse),
           csv_number(r.correlation), std::to_string(r.wall_time_ms), r.error});
  }
  return finish_bench(dir, result, w, manifest, out);
}

int cmd_bench_ppca(const CommonArgs& a, std::ostream& out) {
  Json resolved = resolve("bench-ppca", to_json(sim::PpcaSimConfig{}), a);
  apply_bench_flags(resolved, a, "sigma_0_2_grid");
  Json sim_json = resolved;
  const std::string scheme = take_scheme(sim_json);
  const sim::PpcaSimConfig config = ppca_sim_config(sim_json);
  const fs::path dir = prepare_out(a.out);
  RunManifest manifest = begin_manifest("bench-ppca", resolved);

  const sim::BenchmarkResult result = sim::run_ppca_benchmark(config, run_options(a, scheme));
  CsvWriter w(dir / "records.csv");
  w.row({"replicate", "method", "reconstruction_error", "loading_sparsity", "pc1_corr", "pc2_corr",
         "elbo_final", "elapsed_ms", "error"});
  for (const auto& r : result.records) {
    w.row({std::to_string(r.replicate), r.method, csv_number(r.reconstruction_error),
           csv_number(r.loading_sparsity), csv_number(r.pc1_corr), csv_number(r.pc2_corr),
           csv_number(r.elbo_final), std::to_string(r.wall_time_ms), r.error});
  }
  return finish_bench(dir, result, w, manifest, out);
}

int cmd_threshold_curve(const CommonArgs& a, std::ostream& out) {
  reject(a.replicates_opt, "threshold-curve");
  if (a.scheme_opt->count() > 0) {
    throw InvalidArgument("--scheme does not apply to threshold-curve (both schemes are reported)");
  }
  Json resolved = resolve("threshold-curve", to_json(ThresholdConfig{}), a);
  if (a.sigma0_opt->count() > 0) resolved["sigma0"] = a.sigma0;
  const ThresholdConfig c = threshold_config(resolved);
  const fs::path dir = prepare_out(a.out);
  RunManifest manifest = begin_manifest("threshold-curve", resolved);

  const std::vector<double> points = c.resolved_grid();
  const auto rows = threshold_curve(c.p0, c.sigma_e2, c.sigma_1_2, c.sigma0, points,
                                    GlsFitOptions{c.sweeps, c.tol});
  CsvWriter w(dir / "threshold.csv");
  w.row({"beta_hat", "naive_mean", "sparse_mean", "exact_mean"});
  for (const auto& r : rows) {
    w.row({csv_number(r.beta_hat), csv_number(r.naive_mean), csv_number(r.sparse_mean),
           csv_number(r.exact_mean)});
  }
  w.flush();
  finish_manifest(dir, manifest);
  out << "threshold-curve: " << rows.size() << " grid points -> " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

int exit_code_for(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const NumericalDivergence&) {
    return kExitNumerical;
  } catch (const SingularMatrix&) {
    return kExitNumerical;
  } catch (const Error&) {
    return kExitInput;
  } catch (const nlohmann::json::exception&) {
    return kExitInput;
  } catch (const std::filesystem::filesystem_error&) {
    return kExitInput;
  } catch (...) {
    return kExitFailure;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spike-and-slab variational inference and simulation benchmarks", "spikeslab"};
  app.set_version_flag("--version", SPIKESLAB_VERSION);
  app.require_subcommand(1);

  // CLI11 binds options to addresses, so each subcommand owns its flags.
  std::array<CommonArgs, 5> common;
  std::string beta_hat, corr, data;
  std::vector<double> grid;

  CLI::App* fit_gls = app.add_subcommand("fit-gls", "Fit the summary-statistics regression");
  add_common(fit_gls, common[0]);
  fit_gls->add_option("--beta-hat", beta_hat, "Marginal estimates, one per line");
  fit_gls->add_option("--corr", corr, "Correlation matrix, dense CSV");

  CLI::App* fit_ppca = app.add_subcommand("fit-ppca", "Fit sparse probabilistic PCA");
  add_common(fit_ppca, common[1]);
  fit_ppca->add_option("--data", data, "Data matrix, dense CSV, observations in rows");

  CLI::App* bench_gls = app.add_subcommand("bench-gls", "Simulated regression benchmark");
  add_common(bench_gls, common[2]);
  CLI::App* bench_ppca = app.add_subcommand("bench-ppca", "Simulated PCA benchmark");
  add_common(bench_ppca, common[3]);

  CLI::App* threshold = app.add_subcommand("threshold-curve", "One-dimensional posterior means");
  add_common(threshold, common[4]);
  threshold->add_option("--grid", grid, "Explicit beta_hat values")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (fit_gls->parsed()) {
      if (!beta_hat.empty()) common[0].flag_overrides["beta_hat"] = beta_hat;
      if (!corr.empty()) common[0].flag_overrides["corr"] = corr;
      return cmd_fit_gls(common[0], out);
    }
    if (fit_ppca->parsed()) {
      if (!data.empty()) common[1].flag_overrides["data"] = data;
      return cmd_fit_ppca(common[1], out);
    }
    if (bench_gls->parsed()) return cmd_bench_gls(common[2], out);
    if (bench_ppca->parsed()) return cmd_bench_ppca(common[3], out);
    if (!grid.empty()) common[4].flag_overrides["grid"] = grid;
    return cmd_threshold_curve(common[4], out);
  } catch (...) {
    const std::exception_ptr error = std::current_exception();
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
    } catch (...) {
      err << "error: unknown failure\n";
    }
    return exit_code_for(error);
  }
}

}  // namespace spikeslab::cli
