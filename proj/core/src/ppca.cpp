#include "spikeslab/ppca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "spikeslab/error.hpp"
#include "spikeslab/linalg.hpp"
#include "spikeslab/numeric.hpp"
#include "spikeslab/spike_slab.hpp"

namespace spikeslab {

PpcaProblem::PpcaProblem(Eigen::MatrixXd data, int k, double sigma_e2, double sigma_1_2,
                         double p0)
    : data_(std::move(data)), k_(k), sigma_e2_(sigma_e2), sigma_1_2_(sigma_1_2), p0_(p0) {
  if (data_.size() == 0) throw InvalidArgument("data: empty");
  if (!data_.allFinite()) throw InvalidArgument("data: non-finite entry");
  if (k_ < 1 || k_ > std::min(data_.rows(), data_.cols())) {
    throw InvalidArgument("k: must lie in [1, min(N, P)]");
  }
  if (!(sigma_e2_ > 0.0) || !std::isfinite(sigma_e2_)) {
    throw InvalidArgument("sigma_e2: must be positive");
  }
  if (!(sigma_1_2_ > 0.0) || !std::isfinite(sigma_1_2_)) {
    throw InvalidArgument("sigma_1_2: must be positive");
  }
  if (!(p0_ > 0.0 && p0_ < 1.0)) throw InvalidArgument("p0: must lie in (0, 1)");
}

Eigen::MatrixXd PpcaPosterior::expected_w() const {
  if (is_sparse(scheme)) return ((1.0 - psi_w.array()) * mu_w.array()).matrix();
  return mu_w;
}

Eigen::MatrixXd PpcaPosterior::second_moment_w() const {
  const Eigen::ArrayXXd raw = mu_w.array().square() + s2_w.array();
  if (is_sparse(scheme)) return ((1.0 - psi_w.array()) * raw).matrix();
  return raw.matrix();
}

Eigen::MatrixXd PpcaPosterior::expected_wtw() const {
  const Eigen::MatrixXd mean = expected_w();
  Eigen::MatrixXd out = mean.transpose() * mean;
  out.diagonal() += (second_moment_w() - mean.cwiseAbs2()).colwise().sum().transpose();
  return out;
}

PpcaPosterior ppca_init(const PpcaProblem& problem, Scheme scheme) {
  const TruncatedSvd svd = truncated_svd(problem.data(), problem.k());
  const Eigen::Index p = problem.p();
  const Eigen::Index k = problem.k();
  PpcaPosterior post;
  post.mu_z = svd.u;
  post.cov_z = Eigen::MatrixXd::Identity(k, k);
  post.mu_w = svd.v * svd.values.asDiagonal();
  post.s2_w = Eigen::MatrixXd::Ones(p, k);
  post.psi_w = Eigen::MatrixXd::Constant(p, k, 1e-10);
  post.scheme = scheme;
  return post;
}

namespace {

// Score factor update given the current loading moments; returns
// sum_n E[Z_n Z_n^T].
Eigen::MatrixXd update_scores(const PpcaProblem& problem, PpcaPosterior& post) {
  const Eigen::Index k = problem.k();
  const double se2 = problem.sigma_e2();
  Eigen::MatrixXd precision = post.expected_wtw() / se2;
  precision.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw NumericalDivergence("score precision not positive definite", "cov_z");
  }
  post.cov_z = llt.solve(Eigen::MatrixXd::Identity(k, k));
  post.cov_z = 0.5 * (post.cov_z + post.cov_z.transpose());
  post.mu_z.noalias() = (problem.data() * post.expected_w()) * (post.cov_z / se2);
  if (!post.mu_z.allFinite()) throw NumericalDivergence("non-finite score mean", "mu_z");
  return post.mu_z.transpose() * post.mu_z + static_cast<double>(problem.n()) * post.cov_z;
}

std::string where(Eigen::Index p, Eigen::Index k) {
  return "(p=" + std::to_string(p) + ",k=" + std::to_string(k) + ")";
}

// Sweep driver: scores first, then every loading in (p, k) order.
// `update_loading(p, k, gram_kk, signal)` writes the factor for W_pk and
// returns its new E[W_pk]; `signal` is sum_n X_np E[Z_nk] minus the
// contribution of the other loadings in row p.
template <typename UpdateLoading>
void run_ppca(const PpcaProblem& problem, const PpcaFitOptions& options, PpcaFit& fit,
              UpdateLoading&& update_loading) {
  if (options.sweeps < 1) throw InvalidArgument("sweeps must be at least 1");
  auto& q = fit.posterior;
  for (int sweep = 0; sweep < options.sweeps; ++sweep) {
    const Eigen::MatrixXd gram = update_scores(problem, q);
    const Eigen::MatrixXd data_scores = problem.data().transpose() * q.mu_z;  // P x K
    Eigen::MatrixXd mean_w = q.expected_w();
    for (Eigen::Index p = 0; p < problem.p(); ++p) {
      for (Eigen::Index k = 0; k < problem.k(); ++k) {
        double cross = 0.0;
        for (Eigen::Index l = 0; l < problem.k(); ++l) {
          if (l != k) cross += mean_w(p, l) * gram(k, l);
        }
        mean_w(p, k) = update_loading(p, k, gram(k, k), data_scores(p, k) - cross);
        if (!std::isfinite(mean_w(p, k)) || !std::isfinite(q.s2_w(p, k)) ||
            !std::isfinite(q.psi_w(p, k))) {
          throw NumericalDivergence("non-finite loading update", where(p, k));
        }
      }
    }
    fit.elbo_trace.push_back(elbo_ppca(problem, q));
    fit.sweeps = sweep + 1;
    if (options.rel_elbo_tol && fit.elbo_trace.size() >= 2) {
      const double last = fit.elbo_trace.back();
      const double prev = fit.elbo_trace[fit.elbo_trace.size() - 2];
      if (std::abs(last - prev) <= *options.rel_elbo_tol * std::abs(last)) break;
    }
  }
}

PpcaFit run_sparse(const PpcaProblem& problem, PpcaPosterior initial,
                   const PpcaFitOptions& options) {
  const double se2 = problem.sigma_e2();
  const double s12 = problem.sigma_1_2();
  const double prior_log_odds = std::log(problem.p0()) - std::log1p(-problem.p0());

  PpcaFit fit;
  fit.posterior = std::move(initial);
  auto& q = fit.posterior;
  run_ppca(problem, options, fit, [&](Eigen::Index p, Eigen::Index k, double gram_kk,
                                      double signal) {
    const double s2 = 1.0 / (gram_kk / se2 + 1.0 / s12);
    const double mu = s2 * signal / se2;
    const double log_odds = clamp_log_odds(
        prior_log_odds + 0.5 * std::log(s12 / s2) - 0.5 * mu * mu / s2, &fit.saturated);
    const double psi = logistic(log_odds);
    q.s2_w(p, k) = s2;
    q.mu_w(p, k) = mu;
    q.psi_w(p, k) = psi;
    return (1.0 - psi) * mu;
  });
  return fit;
}

void check_spike_variance(double sigma_0_2) {
  if (!(sigma_0_2 > 0.0) || !std::isfinite(sigma_0_2)) {
    throw AbsoluteContinuityViolation(
        "naive scheme needs sigma_0_2 > 0: KL to a zero-variance spike is undefined");
  }
}

PpcaFit run_naive(const PpcaProblem& problem, PpcaPosterior initial,
                  const PpcaFitOptions& options) {
  const double sigma_0_2 = std::get<NaiveScheme>(initial.scheme).sigma_0_2;
  check_spike_variance(sigma_0_2);
  const double se2 = problem.sigma_e2();
  const double s12 = problem.sigma_1_2();
  const double s02 = sigma_0_2;
  const double prior_log_odds = std::log(problem.p0()) - std::log1p(-problem.p0());
  const double variance_log_ratio = 0.5 * std::log(s12 / s02);
  const double precision_gap = 0.5 * (1.0 / s02 - 1.0 / s12);

  PpcaFit fit;
  fit.posterior = std::move(initial);
  auto& q = fit.posterior;
  run_ppca(problem, options, fit, [&](Eigen::Index p, Eigen::Index k, double gram_kk,
                                      double signal) {
    const double m2 = q.mu_w(p, k) * q.mu_w(p, k) + q.s2_w(p, k);
    const double log_odds = clamp_log_odds(
        prior_log_odds + variance_log_ratio - precision_gap * m2, &fit.saturated);
    const double psi = logistic(log_odds);
    const double s2 = 1.0 / (gram_kk / se2 + psi / s02 + (1.0 - psi) / s12);
    const double mu = s2 * signal / se2;
    q.psi_w(p, k) = psi;
    q.s2_w(p, k) = s2;
    q.mu_w(p, k) = mu;
    return mu;
  });
  return fit;
}

void check_shapes(const PpcaProblem& problem, const PpcaPosterior& q) {
  const Eigen::Index n = problem.n(), p = problem.p(), k = problem.k();
  const bool ok = q.mu_z.rows() == n && q.mu_z.cols() == k && q.cov_z.rows() == k &&
                  q.cov_z.cols() == k && q.mu_w.rows() == p && q.mu_w.cols() == k &&
                  q.s2_w.rows() == p && q.s2_w.cols() == k && q.psi_w.rows() == p &&
                  q.psi_w.cols() == k;
  if (!ok) throw InvalidArgument("initial posterior shape does not match problem");
  if (!(q.s2_w.array() > 0.0).all() || !(q.psi_w.array() >= 0.0).all() ||
      !(q.psi_w.array() <= 1.0).all()) {
    throw InvalidArgument("initial posterior needs s2_w > 0 and psi_w in [0, 1]");
  }
}

}  // namespace

PpcaFit fit_ppca_sparse(const PpcaProblem& problem, const PpcaFitOptions& options) {
  return run_sparse(problem, ppca_init(problem, SparseScheme{}), options);
}

PpcaFit fit_ppca_naive(const PpcaProblem& problem, double sigma_0_2,
                       const PpcaFitOptions& options) {
  check_spike_variance(sigma_0_2);
  return run_naive(problem, ppca_init(problem, NaiveScheme{sigma_0_2}), options);
}

PpcaFit fit_ppca(const PpcaProblem& problem, PpcaPosterior initial, const PpcaFitOptions& options) {
  check_shapes(problem, initial);
  if (is_sparse(initial.scheme)) return run_sparse(problem, std::move(initial), options);
  return run_naive(problem, std::move(initial), options);
}

double expected_log_likelihood_ppca(const PpcaProblem& problem, const PpcaPosterior& posterior) {
  const Eigen::Index n = problem.n();
  const Eigen::Index p = problem.p();
  const Eigen::Index k = problem.k();
  if (posterior.mu_z.rows() != n || posterior.mu_z.cols() != k || posterior.mu_w.rows() != p ||
      posterior.mu_w.cols() != k || posterior.cov_z.rows() != k || posterior.cov_z.cols() != k) {
    throw InvalidArgument("posterior shape does not match problem");
  }
  const double se2 = problem.sigma_e2();
  const Eigen::MatrixXd mean_w = posterior.expected_w();
  const Eigen::MatrixXd gram =
      posterior.mu_z.transpose() * posterior.mu_z + static_cast<double>(n) * posterior.cov_z;
  const double cross = ((problem.data().transpose() * posterior.mu_z).array() * mean_w.array()).sum();
  const double quad = (posterior.expected_wtw().array() * gram.array()).sum();
  const double sq = problem.data().squaredNorm() - 2.0 * cross + quad;
  return -0.5 * static_cast<double>(n * p) * (kLog2Pi + std::log(se2)) - 0.5 * sq / se2;
}

double elbo_ppca(const PpcaProblem& problem, const PpcaPosterior& posterior) {
  const double loglik = expected_log_likelihood_ppca(problem, posterior);
  const auto n = static_cast<double>(problem.n());
  const auto k = static_cast<double>(problem.k());

  Eigen::LLT<Eigen::MatrixXd> llt(posterior.cov_z);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("cov_z: not positive definite");
  }
  const double log_det =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double kl_z = 0.5 * (n * posterior.cov_z.trace() + posterior.mu_z.squaredNorm() - n * k -
                             n * log_det);

  const double p0 = problem.p0();
  double kl_w = 0.0;
  if (is_sparse(posterior.scheme)) {
    const SpikeSlabGaussian prior(p0, GaussianComponent(0.0, problem.sigma_1_2()));
    for (Eigen::Index j = 0; j < posterior.mu_w.cols(); ++j) {
      for (Eigen::Index i = 0; i < posterior.mu_w.rows(); ++i) {
        const SpikeSlabGaussian q(posterior.psi_w(i, j),
                                  GaussianComponent(posterior.mu_w(i, j), posterior.s2_w(i, j)));
        kl_w += kl_spike_slab(q, prior);
      }
    }
  } else {
    const double s02 = std::get<NaiveScheme>(posterior.scheme).sigma_0_2;
    if (!(s02 > 0.0)) {
      throw AbsoluteContinuityViolation("KL to a zero-variance spike is undefined");
    }
    const GaussianComponent spike(0.0, s02);
    const GaussianComponent slab(0.0, problem.sigma_1_2());
    for (Eigen::Index j = 0; j < posterior.mu_w.cols(); ++j) {
      for (Eigen::Index i = 0; i < posterior.mu_w.rows(); ++i) {
        const double psi = posterior.psi_w(i, j);
        const GaussianComponent q(posterior.mu_w(i, j), posterior.s2_w(i, j));
        kl_w += kl_indicator_gaussian(psi, q, p0, spike, slab);
      }
    }
  }
  return loglik - kl_z - kl_w;
}

Eigen::MatrixXd reconstruct(const PpcaPosterior& posterior) {
  return posterior.mu_z * posterior.expected_w().transpose();
}

}  // namespace spikeslab
