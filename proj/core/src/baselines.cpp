#include "spikeslab/baselines.hpp"

#include <Eigen/Cholesky>

#include "spikeslab/error.hpp"
#include "spikeslab/linalg.hpp"

namespace spikeslab::sim {

Eigen::VectorXd baseline_raw(const GlsProblem& problem) { return problem.beta_hat(); }

Eigen::VectorXd baseline_mle(const GlsProblem& problem) {
  Eigen::LLT<Eigen::MatrixXd> llt(problem.corr());
  if (llt.info() != Eigen::Success) {
    throw SingularMatrix("correlation matrix is not numerically invertible");
  }
  Eigen::VectorXd b = llt.solve(problem.beta_hat());
  if (!b.allFinite()) throw SingularMatrix("correlation matrix is not numerically invertible");
  return b;
}

PcaResult classical_pca(const Eigen::MatrixXd& data, int k) {
  const TruncatedSvd svd = truncated_svd(data, k);
  return {svd.u * svd.values.asDiagonal(), svd.v};
}

PcaResult oracle_pca(const Eigen::MatrixXd& data, int k,
                     std::span<const Eigen::Index> active_dims) {
  Eigen::MatrixXd sub(data.rows(), static_cast<Eigen::Index>(active_dims.size()));
  for (std::size_t j = 0; j < active_dims.size(); ++j) {
    const Eigen::Index col = active_dims[j];
    if (col < 0 || col >= data.cols()) throw InvalidArgument("active_dims: index out of range");
    sub.col(static_cast<Eigen::Index>(j)) = data.col(col);
  }
  PcaResult reduced = classical_pca(sub, k);
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(data.cols(), k);
  for (std::size_t j = 0; j < active_dims.size(); ++j) {
    padded.row(active_dims[j]) = reduced.loadings.row(static_cast<Eigen::Index>(j));
  }
  return {std::move(reduced.scores), std::move(padded)};
}

}  // namespace spikeslab::sim
