#include "spikeslab/benchmark_runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "spikeslab/baselines.hpp"
#include "spikeslab/error.hpp"
#include "spikeslab/format.hpp"
#include "spikeslab/linalg.hpp"
#include "spikeslab/metrics.hpp"

namespace spikeslab::sim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSparsityThreshold = 1e-5;

BenchmarkRecord blank_record(int replicate, std::string method, double sigma_e2) {
  BenchmarkRecord r;
  r.replicate = replicate;
  r.method = std::move(method);
  r.sigma_e2 = sigma_e2;
  r.mse = r.correlation = r.reconstruction_error = kNaN;
  r.loading_sparsity = r.pc1_corr = r.pc2_corr = r.elbo_final = kNaN;
  return r;
}

// Runs body(record), timing it and turning any exception into record.error.
void timed(BenchmarkRecord& record, const RunOptions& options,
           const std::function<void(BenchmarkRecord&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  try {
    body(record);
  } catch (const std::exception& e) {
    record.error = e.what();
  }
  if (options.record_timing) {
    record.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count();
  }
}

std::string naive_tag(double sigma_0_2) { return "naive_s0=" + format_double(sigma_0_2); }

// Each task pushes a block of records; blocks are stored by task index so
// the output order never depends on scheduling.
template <typename Task>
BenchmarkResult run_tasks(std::size_t n_tasks, const RunOptions& options, Task task) {
  std::vector<std::vector<BenchmarkRecord>> blocks(n_tasks);
  std::vector<char> done(n_tasks, 0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      if (options.cancel != nullptr && options.cancel->load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        blocks[i] = task(i);
        done[i] = 1;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const unsigned n_threads =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n_tasks)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  BenchmarkResult result;
  for (std::size_t i = 0; i < n_tasks; ++i) {
    if (!done[i]) {
      result.truncated = true;
      break;
    }
    for (auto& r : blocks[i]) result.records.push_back(std::move(r));
  }
  return result;
}

void fill_gls_metrics(BenchmarkRecord& r, const Eigen::VectorXd& estimate,
                      const Eigen::VectorXd& truth) {
  r.mse = metric_mse(estimate, truth);
  try {
    r.correlation = metric_corr(estimate, truth);
  } catch (const CorrelationUndefined& e) {
    r.error = e.what();
  }
}

double abs_column_corr(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::Index col) {
  if (col >= a.cols() || col >= b.cols()) return kNaN;
  return std::abs(metric_corr(a.col(col), b.col(col)));
}

}  // namespace

BenchmarkResult run_gls_benchmark(const GlsSimConfig& config, const RunOptions& options) {
  config.validate();
  const std::size_t reps = static_cast<std::size_t>(config.replicates);
  const std::size_t n_tasks = config.sigma_e2_grid.size() * reps;
  const GlsFitOptions fit_options{config.sweeps, config.tol};

  return run_tasks(n_tasks, options, [&](std::size_t task) {
    const std::size_t sigma_index = task / reps;
    const int replicate = static_cast<int>(task % reps);
    const GlsSimulation sim = simulate_gls(config, sigma_index, static_cast<std::size_t>(replicate));
    const double s2 = sim.sigma_e2;
    std::vector<BenchmarkRecord> out;

    auto fit_record = [&](std::string tag, const std::function<FitReport(const GlsProblem&)>& fit) {
      BenchmarkRecord r = blank_record(replicate, std::move(tag), s2);
      timed(r, options, [&](BenchmarkRecord& rec) {
        FitReport report = fit(sim.problem());
        rec.elbo_final = report.elbo_trace.empty() ? kNaN : report.elbo_trace.back();
        if (options.keep_traces) rec.elbo_trace = std::move(report.elbo_trace);
        fill_gls_metrics(rec, report.posterior.posterior_mean(), sim.true_beta);
      });
      out.push_back(std::move(r));
    };

    if (options.include_sparse) {
      fit_record("sparse", [&](const GlsProblem& p) { return fit_gls_sparse(p, fit_options); });
    }
    for (double s0 : config.naive_sigma0_grid) {
      if (!options.include_naive) break;
      fit_record(naive_tag(s0),
                 [&](const GlsProblem& p) { return fit_gls_naive_best(p, s0, fit_options); });
    }

    BenchmarkRecord raw = blank_record(replicate, "raw", s2);
    timed(raw, options, [&](BenchmarkRecord& rec) {
      fill_gls_metrics(rec, baseline_raw(sim.problem()), sim.true_beta);
    });
    out.push_back(std::move(raw));

    BenchmarkRecord mle = blank_record(replicate, "mle", s2);
    timed(mle, options, [&](BenchmarkRecord& rec) {
      fill_gls_metrics(rec, baseline_mle(sim.problem()), sim.true_beta);
    });
    out.push_back(std::move(mle));
    return out;
  });
}

BenchmarkResult run_ppca_benchmark(const PpcaSimConfig& config, const RunOptions& options) {
  config.validate();
  const PpcaFitOptions fit_options{config.sweeps, std::nullopt};

  return run_tasks(static_cast<std::size_t>(config.replicates), options, [&](std::size_t task) {
    const int replicate = static_cast<int>(task);
    const PpcaSimulation sim = simulate_ppca(config, task);
    const PpcaProblem& problem = sim.problem;
    const double s2 = config.sigma_e2;
    std::vector<BenchmarkRecord> out;

    // The classical fit anchors the score correlations, so it runs first
    // and is emitted after the VI methods.
    BenchmarkRecord classical = blank_record(replicate, "classical", s2);
    PcaResult classical_fit;
    bool have_classical = false;
    timed(classical, options, [&](BenchmarkRecord& rec) {
      classical_fit = classical_pca(problem.data(), problem.k());
      have_classical = true;
      rec.reconstruction_error =
          metric_reconstruction(classical_fit.scores * classical_fit.loadings.transpose(), sim.signal);
      rec.loading_sparsity = fraction_below(classical_fit.loadings, kSparsityThreshold);
      rec.pc1_corr = 1.0;
      rec.pc2_corr = problem.k() > 1 ? 1.0 : kNaN;
    });

    auto fit_record = [&](std::string tag, const std::function<PpcaFit()>& fit) {
      BenchmarkRecord r = blank_record(replicate, std::move(tag), s2);
      timed(r, options, [&](BenchmarkRecord& rec) {
        PpcaFit result = fit();
        rec.elbo_final = result.elbo_trace.empty() ? kNaN : result.elbo_trace.back();
        if (options.keep_traces) rec.elbo_trace = std::move(result.elbo_trace);
        rec.reconstruction_error = metric_reconstruction(reconstruct(result.posterior), sim.signal);
        rec.loading_sparsity = fraction_below(result.posterior.expected_w(), kSparsityThreshold);
        if (have_classical) {
          rec.pc1_corr = abs_column_corr(result.posterior.mu_z, classical_fit.scores, 0);
          rec.pc2_corr = abs_column_corr(result.posterior.mu_z, classical_fit.scores, 1);
        }
      });
      out.push_back(std::move(r));
    };

    if (options.include_sparse) {
      fit_record("sparse", [&] { return fit_ppca_sparse(problem, fit_options); });
    }
    for (double s0 : config.sigma_0_2_grid) {
      if (!options.include_naive) break;
      fit_record(naive_tag(s0), [&] { return fit_ppca_naive(problem, s0, fit_options); });
    }
    out.push_back(std::move(classical));

    BenchmarkRecord oracle = blank_record(replicate, "oracle", s2);
    timed(oracle, options, [&](BenchmarkRecord& rec) {
      const PcaResult fit = oracle_pca(problem.data(), problem.k(), sim.active_dims);
      rec.reconstruction_error =
          metric_reconstruction(fit.scores * fit.loadings.transpose(), sim.signal);
      rec.loading_sparsity = fraction_below(fit.loadings, kSparsityThreshold);
      if (have_classical) {
        rec.pc1_corr = abs_column_corr(fit.scores, classical_fit.scores, 0);
        rec.pc2_corr = abs_column_corr(fit.scores, classical_fit.scores, 1);
      }
    });
    out.push_back(std::move(oracle));
    return out;
  });
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return kNaN;
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<BenchmarkRecord>& records) {
  static const std::vector<std::pair<std::string, double BenchmarkRecord::*>> metrics{
      {"mse", &BenchmarkRecord::mse},
      {"correlation", &BenchmarkRecord::correlation},
      {"reconstruction_error", &BenchmarkRecord::reconstruction_error},
      {"loading_sparsity", &BenchmarkRecord::loading_sparsity},
      {"pc1_corr", &BenchmarkRecord::pc1_corr},
      {"pc2_corr", &BenchmarkRecord::pc2_corr},
      {"elbo_final", &BenchmarkRecord::elbo_final},
  };

  // Keyed by first appearance so the summary follows record order.
  std::vector<std::pair<std::string, double>> keys;
  std::map<std::pair<std::string, double>, std::vector<const BenchmarkRecord*>> groups;
  for (const auto& r : records) {
    auto key = std::make_pair(r.method, r.sigma_e2);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(&r);
  }

  std::vector<SummaryRow> rows;
  for (const auto& key : keys) {
    for (const auto& [name, field] : metrics) {
      std::vector<double> values;
      for (const BenchmarkRecord* r : groups[key]) {
        const double v = r->*field;
        if (std::isfinite(v)) values.push_back(v);
      }
      if (values.empty()) continue;
      double sum = 0.0;
      for (double v : values) sum += v;
      rows.push_back({key.first, key.second, name, values.size(),
                      sum / static_cast<double>(values.size()), quantile(values, 0.25),
                      quantile(values, 0.75)});
    }
  }
  return rows;
}

}  // namespace spikeslab::sim
