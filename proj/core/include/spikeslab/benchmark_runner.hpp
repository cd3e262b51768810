#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "spikeslab/simulate.hpp"

namespace spikeslab::sim {

// One (replicate, method) outcome. Metrics that do not apply to a method
// are NaN; a failed fit leaves its metrics NaN and sets `error`.
struct BenchmarkRecord {
  int replicate = 0;
  std::string method;
  double sigma_e2 = 0.0;
  double mse = 0.0;
  double correlation = 0.0;
  double reconstruction_error = 0.0;
  double loading_sparsity = 0.0;  // fraction of |E[W]| below 1e-5
  double pc1_corr = 0.0;          // |corr| of score columns against classical PCA
  double pc2_corr = 0.0;
  double elbo_final = 0.0;
  std::int64_t wall_time_ms = 0;
  std::string error;
  std::vector<double> elbo_trace;  // filled only with RunOptions::keep_traces
};

struct RunOptions {
  unsigned threads = 1;
  // Polled between tasks; once set no new replicate is started.
  const std::atomic<bool>* cancel = nullptr;
  bool record_timing = true;
  bool keep_traces = false;
  // Which variational families run; baselines always run.
  bool include_sparse = true;
  bool include_naive = true;
};

struct BenchmarkResult {
  std::vector<BenchmarkRecord> records;
  bool truncated = false;
};

// Methods per (sigma_e2, replicate): sparse, naive_s0=<v> for each grid
// value, raw, mle. Records are ordered by sigma_e2 index, replicate, then
// method.
BenchmarkResult run_gls_benchmark(const GlsSimConfig& config, const RunOptions& options = {});

// Methods per replicate: sparse, naive_s0=<v> for each grid value,
// classical, oracle.
BenchmarkResult run_ppca_benchmark(const PpcaSimConfig& config, const RunOptions& options = {});

struct SummaryRow {
  std::string method;
  double sigma_e2 = 0.0;
  std::string metric;
  std::size_t count = 0;
  double mean = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

// Per (method, sigma_e2) mean and interquartile range of every applicable
// metric, skipping NaN entries.
std::vector<SummaryRow> summarize(const std::vector<BenchmarkRecord>& records);

// Linear-interpolation quantile of unsorted values (the usual "type 7").
double quantile(std::vector<double> values, double q);

}  // namespace spikeslab::sim
