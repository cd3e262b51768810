#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "spikeslab/scheme.hpp"

namespace spikeslab {

// Probabilistic PCA with a spike-and-slab prior on the loadings:
//   W_pk ~ p0 delta_0 + (1 - p0) N(0, sigma_1_2),  Z_n ~ N(0, I_K),
//   X_n | Z_n, W ~ N(W Z_n, sigma_e2 I_P).
// Rows of `data` are observations. Data is used as given (no centering).
class PpcaProblem {
 public:
  // Throws InvalidArgument for non-finite data, k outside [1, min(N, P)],
  // non-positive variances or p0 outside (0, 1).
  PpcaProblem(Eigen::MatrixXd data, int k, double sigma_e2, double sigma_1_2, double p0);

  const Eigen::MatrixXd& data() const noexcept { return data_; }
  Eigen::Index n() const noexcept { return data_.rows(); }
  Eigen::Index p() const noexcept { return data_.cols(); }
  int k() const noexcept { return k_; }
  double sigma_e2() const noexcept { return sigma_e2_; }
  double sigma_1_2() const noexcept { return sigma_1_2_; }
  double p0() const noexcept { return p0_; }

 private:
  Eigen::MatrixXd data_;
  int k_;
  double sigma_e2_;
  double sigma_1_2_;
  double p0_;
};

// Mean-field posterior. The score covariance has no n-dependence, so a
// single K x K matrix is shared by every row of mu_z.
struct PpcaPosterior {
  Eigen::MatrixXd mu_z;   // N x K
  Eigen::MatrixXd cov_z;  // K x K
  Eigen::MatrixXd mu_w;   // P x K, slab means
  Eigen::MatrixXd s2_w;   // P x K, slab variances
  Eigen::MatrixXd psi_w;  // P x K, q(W_pk = 0) or q(Y_pk = 0) for the naive scheme
  Scheme scheme;

  Eigen::MatrixXd expected_w() const;
  // Elementwise E[W_pk^2].
  Eigen::MatrixXd second_moment_w() const;
  // E[W^T W] = E[W]^T E[W] + diag(sum_p Var(W_pk)).
  Eigen::MatrixXd expected_wtw() const;
};

struct PpcaFitOptions {
  int sweeps = 250;
  // Optional early exit on |ELBo change| <= tol * |ELBo|. Off by default.
  std::optional<double> rel_elbo_tol;
};

struct PpcaFit {
  PpcaPosterior posterior;
  std::vector<double> elbo_trace;
  int sweeps = 0;
  bool saturated = false;
};

// SVD start: mu_z = leading left singular vectors, mu_w = V * Sigma,
// cov_z = I, s2_w = 1, psi_w = 1e-10. Throws RankDeficient.
PpcaPosterior ppca_init(const PpcaProblem& problem, Scheme scheme);

// Spike-and-slab CAVI: each sweep refreshes the score factor, then every
// loading's slab variance, slab mean and spike probability.
// Throws NumericalDivergence("(p=..,k=..)") on a non-finite update.
PpcaFit fit_ppca_sparse(const PpcaProblem& problem, const PpcaFitOptions& options = {});

// Auxiliary-indicator CAVI: scores, then per loading the indicator followed
// by the Gaussian factor. Throws AbsoluteContinuityViolation for
// sigma_0_2 <= 0.
PpcaFit fit_ppca_naive(const PpcaProblem& problem, double sigma_0_2,
                       const PpcaFitOptions& options = {});

// Runs the scheme recorded in `initial` from that starting point. Throws
// InvalidArgument when shapes disagree with the problem.
PpcaFit fit_ppca(const PpcaProblem& problem, PpcaPosterior initial,
                 const PpcaFitOptions& options = {});

// E_q[log p(X | W, Z)] including the -(N P / 2) log(2 pi sigma_e2) term.
double expected_log_likelihood_ppca(const PpcaProblem& problem, const PpcaPosterior& posterior);

// Expected log-likelihood minus KL terms for the scores and loadings.
double elbo_ppca(const PpcaProblem& problem, const PpcaPosterior& posterior);

// mu_z * E[W]^T.
Eigen::MatrixXd reconstruct(const PpcaPosterior& posterior);

}  // namespace spikeslab
