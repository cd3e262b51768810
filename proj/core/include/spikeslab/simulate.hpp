#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "spikeslab/gls.hpp"
#include "spikeslab/ppca.hpp"

namespace spikeslab::sim {

struct GlsSimConfig {
  int p_dim = 1000;
  double p0 = 0.99;
  double sigma_1_2 = 1.0;
  std::vector<double> sigma_e2_grid{0.05, 0.25, 0.5, 1.0};
  int wishart_df = 1000;
  int replicates = 100;
  std::uint64_t seed = 1;
  std::vector<double> naive_sigma0_grid{1.0, 1e-2, 1e-4, 1e-10};
  int sweeps = 100;
  double tol = 1e-8;

  // Throws InvalidArgument naming the offending field.
  void validate() const;
};

struct GlsSimulation {
  Eigen::VectorXd beta_hat;
  Eigen::MatrixXd corr;
  Eigen::VectorXd true_beta;
  double sigma_e2 = 1.0;
  double sigma_1_2 = 1.0;
  double p0 = 0.99;

  // Inference problem with the generating hyperparameters.
  GlsProblem problem() const;
};

// corr = G^T G / df with G a df x P standard normal matrix; beta from the
// spike-and-slab prior; beta_hat = corr beta + sqrt(sigma_e2) L z with
// corr = L L^T. Determined by (seed, sigma_index, replicate).
GlsSimulation simulate_gls(const GlsSimConfig& config, std::size_t sigma_index,
                           std::size_t replicate);

struct PpcaSimConfig {
  int n = 500;
  int p = 10000;
  std::vector<int> cluster_sizes{200, 200, 50, 50};
  int informative_dims = 100;
  int k_fit = 2;
  double sigma_1_2 = 0.5;
  double sigma_e2 = 1.0;
  double p0 = 1.0 - 100.0 / 10000.0;
  std::vector<double> sigma_0_2_grid{0.5, 0.05, 0.01, 0.005, 1e-4, 1e-8};
  int replicates = 5;
  int sweeps = 250;
  std::uint64_t seed = 1;

  void validate() const;
};

struct PpcaSimulation {
  PpcaProblem problem;
  // Cluster-mean part of the data after the same centering and scaling.
  Eigen::MatrixXd signal;
  std::vector<Eigen::Index> active_dims;
  // Columns with zero empirical variance (left centered, scale 1).
  std::vector<Eigen::Index> degenerate_columns;
  std::vector<int> labels;
};

// Clustered data: informative columns draw N(mu_c, 1) with mu_c ~ N(0, 1)
// per (cluster, column); other columns are N(0, 1). Every column is then
// centered and divided by its empirical standard deviation (n - 1).
PpcaSimulation simulate_ppca(const PpcaSimConfig& config, std::size_t replicate);

}  // namespace spikeslab::sim
