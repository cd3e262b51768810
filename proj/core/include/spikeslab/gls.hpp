#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "spikeslab/scheme.hpp"
#include "spikeslab/spike_slab.hpp"

namespace spikeslab {

// Summary-statistics regression with a spike-and-slab prior:
//   beta_j ~ p0 delta_0 + (1 - p0) N(0, sigma_1_2)
//   beta_hat | beta ~ N(corr * beta, sigma_e2 * corr)
class GlsProblem {
 public:
  // Validates shapes, p0 in (0, 1), positive variances, corr symmetric
  // (1e-10), positive diagonal and positive semidefinite (Cholesky of
  // corr + 1e-10 I). Throws InvalidArgument naming the offending field.
  GlsProblem(Eigen::VectorXd beta_hat, Eigen::MatrixXd corr, double sigma_e2, double sigma_1_2,
             double p0);

  Eigen::Index dim() const noexcept { return beta_hat_.size(); }
  const Eigen::VectorXd& beta_hat() const noexcept { return beta_hat_; }
  const Eigen::MatrixXd& corr() const noexcept { return corr_; }
  double sigma_e2() const noexcept { return sigma_e2_; }
  double sigma_1_2() const noexcept { return sigma_1_2_; }
  double p0() const noexcept { return p0_; }

  SpikeSlabGaussian prior() const;

 private:
  Eigen::VectorXd beta_hat_;
  Eigen::MatrixXd corr_;
  double sigma_e2_;
  double sigma_1_2_;
  double p0_;
};

// Factorized posterior. Under the sparse scheme coordinate i is
// psi_i delta_0 + (1 - psi_i) N(mu_i, s2_i); under the naive scheme it is
// N(mu_i, s2_i) with an independent indicator that is zero w.p. psi_i.
struct GlsPosterior {
  Eigen::VectorXd psi;
  Eigen::VectorXd mu;
  Eigen::VectorXd s2;
  Scheme scheme;

  Eigen::VectorXd posterior_mean() const;
  Eigen::VectorXd second_moment() const;
};

enum class Init {
  Prior,  // psi = p0 (sparse default)
  Spike,  // psi = 1 (naive default)
  Slab,   // psi = 0
};

struct GlsFitOptions {
  int sweeps = 100;
  // Early exit once the largest change in a posterior mean over a sweep
  // falls below tol. Zero disables it.
  double tol = 1e-8;
};

struct FitReport {
  GlsPosterior posterior;
  std::vector<double> elbo_trace;  // one entry per completed sweep
  int sweeps = 0;
  bool converged = false;
  bool saturated = false;  // some log-odds hit the +-700 clamp
  Init init = Init::Prior;
  double max_residual_drift = 0.0;  // incremental vs recomputed corr * E[beta]
};

// Spike-and-slab CAVI. Per coordinate the slab mean/variance are refreshed
// from the residual beta_hat_i - sum_{j != i} corr_ij E[beta_j], then psi_i.
// Throws InvalidArgument for sweeps < 1 and NumericalDivergence("i=<index>")
// on a non-finite update.
FitReport fit_gls_sparse(const GlsProblem& problem, const GlsFitOptions& options = {});

// Auxiliary-indicator CAVI with slab-like spike N(0, sigma_0_2). Throws
// AbsoluteContinuityViolation for sigma_0_2 <= 0.
FitReport fit_gls_naive(const GlsProblem& problem, double sigma_0_2,
                        const GlsFitOptions& options = {}, Init init = Init::Spike);

// Runs fit_gls_naive from the spike and the slab initializations and keeps
// the one with the larger final ELBo (spike wins ties).
FitReport fit_gls_naive_best(const GlsProblem& problem, double sigma_0_2,
                             const GlsFitOptions& options = {});

// E_q[log p(beta_hat | beta)] - sum_i KL(q_i || prior_i), dropping
// -(P/2) log(2 pi sigma_e2) - 1/2 log det corr - beta_hat' corr^{-1} beta_hat / (2 sigma_e2).
double elbo_gls(const GlsProblem& problem, const GlsPosterior& posterior);

// Expected log-likelihood part of elbo_gls (same dropped constants).
double expected_log_likelihood_gls(const GlsProblem& problem, const GlsPosterior& posterior);

// Exact posterior for one effect observed as beta_hat ~ N(beta, sigma_e2)
// under the spike-and-slab prior.
SpikeSlabGaussian exact_posterior_1d(double beta_hat, double p0, double sigma_e2,
                                     double sigma_1_2);

struct ThresholdRow {
  double beta_hat;
  double naive_mean;
  double sparse_mean;
  double exact_mean;
};

// P = 1 comparison of the naive (ELBo-best initialization), sparse and
// exact posterior means over a sorted grid of beta_hat values.
std::vector<ThresholdRow> threshold_curve(double p0, double sigma_e2, double sigma_1_2,
                                          double sigma_0_2, std::span<const double> beta_hat_grid,
                                          const GlsFitOptions& options = {});

}  // namespace spikeslab
