#include "spikeslab/simulate.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Cholesky>

#include "spikeslab/error.hpp"
#include "spikeslab/rng.hpp"

namespace spikeslab::sim {

namespace {

Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(engine);
  }
  return m;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

}  // namespace

void GlsSimConfig::validate() const {
  require(p_dim >= 1, "p_dim: must be at least 1");
  require(p0 >= 0.0 && p0 <= 1.0, "p0: must lie in [0, 1]");
  require(sigma_1_2 > 0.0, "sigma_1_2: must be positive");
  require(!sigma_e2_grid.empty(), "sigma_e2_grid: empty");
  for (double s : sigma_e2_grid) require(s > 0.0, "sigma_e2_grid: values must be positive");
  require(wishart_df >= p_dim, "wishart_df: must be at least p_dim");
  require(replicates >= 1, "replicates: must be at least 1");
  for (double s : naive_sigma0_grid) require(s > 0.0, "naive_sigma0_grid: values must be positive");
  require(sweeps >= 1, "sweeps: must be at least 1");
  require(tol >= 0.0, "tol: must be non-negative");
}

GlsProblem GlsSimulation::problem() const {
  return GlsProblem(beta_hat, corr, sigma_e2, sigma_1_2, p0);
}

GlsSimulation simulate_gls(const GlsSimConfig& config, std::size_t sigma_index,
                           std::size_t replicate) {
  config.validate();
  if (sigma_index >= config.sigma_e2_grid.size()) {
    throw InvalidArgument("sigma_index out of range");
  }
  const Eigen::Index p = config.p_dim;
  const std::uint64_t si = sigma_index;
  const std::uint64_t rep = replicate;

  GlsSimulation out;
  out.sigma_e2 = config.sigma_e2_grid[sigma_index];
  out.sigma_1_2 = config.sigma_1_2;
  out.p0 = config.p0;

  {
    Engine engine = make_engine(config.seed, {kGlsExperiment, si, rep, kWishartDraw});
    const Eigen::MatrixXd g = standard_normal_matrix(config.wishart_df, p, engine);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(g.transpose());
    out.corr = gram.selfadjointView<Eigen::Lower>();
    out.corr /= static_cast<double>(config.wishart_df);
  }
  {
    Engine engine = make_engine(config.seed, {kGlsExperiment, si, rep, kEffectDraw});
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> slab(0.0, std::sqrt(config.sigma_1_2));
    out.true_beta.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      const bool spike = unif(engine) < config.p0;
      const double draw = slab(engine);
      out.true_beta(j) = spike ? 0.0 : draw;
    }
  }
  {
    Eigen::LLT<Eigen::MatrixXd> llt(out.corr);
    if (llt.info() != Eigen::Success) {
      throw SingularMatrix("Wishart draw is not positive definite");
    }
    Engine engine = make_engine(config.seed, {kGlsExperiment, si, rep, kNoiseDraw});
    const Eigen::VectorXd z = standard_normal_matrix(p, 1, engine).col(0);
    const Eigen::VectorXd lz = llt.matrixL() * z;
    out.beta_hat = out.corr * out.true_beta + std::sqrt(out.sigma_e2) * lz;
  }
  return out;
}

void PpcaSimConfig::validate() const {
  require(n >= 1 && p >= 1, "n, p: must be positive");
  require(!cluster_sizes.empty(), "cluster_sizes: empty");
  for (int c : cluster_sizes) require(c >= 1, "cluster_sizes: entries must be positive");
  require(std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), 0) == n,
          "cluster_sizes: must sum to n");
  require(informative_dims >= 0 && informative_dims <= p, "informative_dims: must lie in [0, p]");
  require(k_fit >= 1 && k_fit <= std::min(n, p), "k_fit: must lie in [1, min(n, p)]");
  require(sigma_1_2 > 0.0, "sigma_1_2: must be positive");
  require(sigma_e2 > 0.0, "sigma_e2: must be positive");
  require(p0 > 0.0 && p0 < 1.0, "p0: must lie in (0, 1)");
  for (double s : sigma_0_2_grid) require(s > 0.0, "sigma_0_2_grid: values must be positive");
  require(replicates >= 1, "replicates: must be at least 1");
  require(sweeps >= 1, "sweeps: must be at least 1");
}

PpcaSimulation simulate_ppca(const PpcaSimConfig& config, std::size_t replicate) {
  config.validate();
  const Eigen::Index n = config.n;
  const Eigen::Index p = config.p;
  const Eigen::Index informative = config.informative_dims;
  const auto n_clusters = static_cast<Eigen::Index>(config.cluster_sizes.size());
  const std::uint64_t rep = replicate;

  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < static_cast<int>(config.cluster_sizes.size()); ++c) {
    labels.insert(labels.end(), static_cast<std::size_t>(config.cluster_sizes[c]), c);
  }

  Eigen::MatrixXd cluster_means;
  {
    Engine engine = make_engine(config.seed, {kPpcaExperiment, rep, kClusterMeans});
    cluster_means = standard_normal_matrix(n_clusters, informative, engine);
  }
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    means.row(i).head(informative) = cluster_means.row(labels[static_cast<std::size_t>(i)]);
  }
  Eigen::MatrixXd raw;
  {
    Engine engine = make_engine(config.seed, {kPpcaExperiment, rep, kEntryNoise});
    raw = standard_normal_matrix(n, p, engine) + means;
  }

  std::vector<Eigen::Index> degenerate;
  Eigen::MatrixXd signal(n, p);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = raw.col(j).mean();
    raw.col(j).array() -= mean;
    double sd = std::sqrt(raw.col(j).squaredNorm() / denom);
    if (!(sd > 0.0)) {
      degenerate.push_back(j);
      sd = 1.0;
    }
    raw.col(j) /= sd;
    signal.col(j) = (means.col(j).array() - means.col(j).mean()) / sd;
  }

  std::vector<Eigen::Index> active(static_cast<std::size_t>(informative));
  std::iota(active.begin(), active.end(), Eigen::Index{0});

  return PpcaSimulation{
      PpcaProblem(std::move(raw), config.k_fit, config.sigma_e2, config.sigma_1_2, config.p0),
      std::move(signal), std::move(active), std::move(degenerate), std::move(labels)};
}

}  // namespace spikeslab::sim
