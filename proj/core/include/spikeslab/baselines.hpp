#pragma once

#include <span>

#include <Eigen/Core>

#include "spikeslab/gls.hpp"

namespace spikeslab::sim {

// The marginal estimates themselves.
Eigen::VectorXd baseline_raw(const GlsProblem& problem);

// Solves corr * b = beta_hat by Cholesky. Throws SingularMatrix when the
// factorization fails.
Eigen::VectorXd baseline_mle(const GlsProblem& problem);

struct PcaResult {
  Eigen::MatrixXd scores;    // N x K, U * Sigma
  Eigen::MatrixXd loadings;  // P x K, orthonormal columns
};

// Rank-k SVD with the sign convention of ppca_init.
PcaResult classical_pca(const Eigen::MatrixXd& data, int k);

// classical_pca on the active columns; loadings are zero-padded back to P
// rows.
PcaResult oracle_pca(const Eigen::MatrixXd& data, int k, std::span<const Eigen::Index> active_dims);

}  // namespace spikeslab::sim
