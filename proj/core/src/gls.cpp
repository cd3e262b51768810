#include "spikeslab/gls.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikeslab/error.hpp"
#include "spikeslab/linalg.hpp"
#include "spikeslab/numeric.hpp"

namespace spikeslab {

GlsProblem::GlsProblem(Eigen::VectorXd beta_hat, Eigen::MatrixXd corr, double sigma_e2,
                       double sigma_1_2, double p0)
    : beta_hat_(std::move(beta_hat)),
      corr_(std::move(corr)),
      sigma_e2_(sigma_e2),
      sigma_1_2_(sigma_1_2),
      p0_(p0) {
  const Eigen::Index p = beta_hat_.size();
  if (p == 0) throw InvalidArgument("beta_hat: empty");
  if (!beta_hat_.allFinite()) throw InvalidArgument("beta_hat: non-finite entry");
  if (corr_.rows() != p || corr_.cols() != p) {
    throw InvalidArgument("corr: expected " + std::to_string(p) + "x" + std::to_string(p) +
                          ", got " + std::to_string(corr_.rows()) + "x" +
                          std::to_string(corr_.cols()));
  }
  if (!corr_.allFinite()) throw InvalidArgument("corr: non-finite entry");
  if (!(sigma_e2_ > 0.0) || !std::isfinite(sigma_e2_)) {
    throw InvalidArgument("sigma_e2: must be positive");
  }
  if (!(sigma_1_2_ > 0.0) || !std::isfinite(sigma_1_2_)) {
    throw InvalidArgument("sigma_1_2: must be positive");
  }
  if (!(p0_ > 0.0 && p0_ < 1.0)) throw InvalidArgument("p0: must lie in (0, 1)");
  if (!is_symmetric(corr_, 1e-10)) throw InvalidArgument("corr: not symmetric");
  if ((corr_.diagonal().array() <= 0.0).any()) {
    throw InvalidArgument("corr: non-positive diagonal entry");
  }
  if (!is_positive_semidefinite(corr_, 1e-10)) {
    throw InvalidArgument("corr: not positive semidefinite");
  }
}

SpikeSlabGaussian GlsProblem::prior() const {
  return SpikeSlabGaussian(p0_, GaussianComponent(0.0, sigma_1_2_));
}

Eigen::VectorXd GlsPosterior::posterior_mean() const {
  if (is_sparse(scheme)) return ((1.0 - psi.array()) * mu.array()).matrix();
  return mu;
}

Eigen::VectorXd GlsPosterior::second_moment() const {
  const Eigen::ArrayXd raw = mu.array().square() + s2.array();
  if (is_sparse(scheme)) return ((1.0 - psi.array()) * raw).matrix();
  return raw.matrix();
}

namespace {

void check_options(const GlsFitOptions& options) {
  if (options.sweeps < 1) throw InvalidArgument("sweeps must be at least 1");
  if (!(options.tol >= 0.0)) throw InvalidArgument("tol must be non-negative");
}

double initial_psi(Init init, double p0) {
  switch (init) {
    case Init::Prior:
      return p0;
    case Init::Spike:
      return 1.0;
    case Init::Slab:
      return 0.0;
  }
  return p0;
}

// Shared sweep driver. `update(i, residual)` refreshes coordinate i from the
// residual and returns its new posterior mean.
template <typename Update>
void run_sweeps(const GlsProblem& problem, const GlsFitOptions& options, FitReport& report,
                Update&& update) {
  const Eigen::MatrixXd& x = problem.corr();
  const Eigen::VectorXd& beta_hat = problem.beta_hat();
  const Eigen::Index p = problem.dim();

  Eigen::VectorXd mean = report.posterior.posterior_mean();
  Eigen::VectorXd fitted = x * mean;

  for (int sweep = 0; sweep < options.sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
      const double residual = beta_hat(i) - (fitted(i) - x(i, i) * mean(i));
      const double updated = update(i, residual);
      if (!std::isfinite(updated)) {
        throw NumericalDivergence("non-finite posterior mean", "i=" + std::to_string(i));
      }
      const double delta = updated - mean(i);
      if (delta != 0.0) {
        fitted.noalias() += delta * x.col(i);
        mean(i) = updated;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    const Eigen::VectorXd recomputed = x * mean;
    report.max_residual_drift =
        std::max(report.max_residual_drift, (recomputed - fitted).cwiseAbs().maxCoeff());
    fitted = recomputed;

    report.elbo_trace.push_back(elbo_gls(problem, report.posterior));
    report.sweeps = sweep + 1;
    if (max_change < options.tol) {
      report.converged = true;
      break;
    }
  }
}

}  // namespace

FitReport fit_gls_sparse(const GlsProblem& problem, const GlsFitOptions& options) {
  check_options(options);
  const Eigen::Index p = problem.dim();
  const double se2 = problem.sigma_e2();
  const double s12 = problem.sigma_1_2();
  const double prior_log_odds = std::log(problem.p0()) - std::log1p(-problem.p0());
  const Eigen::MatrixXd& x = problem.corr();

  FitReport report;
  report.init = Init::Prior;
  report.posterior = GlsPosterior{Eigen::VectorXd::Constant(p, problem.p0()),
                                  Eigen::VectorXd::Zero(p),
                                  Eigen::VectorXd::Constant(p, s12 + se2), SparseScheme{}};

  // The slab variance does not depend on the other coordinates.
  const Eigen::VectorXd slab_var =
      (1.0 / (1.0 / s12 + x.diagonal().array() / se2)).matrix();

  auto& post = report.posterior;
  run_sweeps(problem, options, report, [&](Eigen::Index i, double residual) {
    const double s2 = slab_var(i);
    const double mu = residual / (se2 / s12 + x(i, i));
    const double log_odds = clamp_log_odds(
        prior_log_odds + 0.5 * std::log(s12 / s2) - 0.5 * mu * mu / s2, &report.saturated);
    post.mu(i) = mu;
    post.s2(i) = s2;
    post.psi(i) = logistic(log_odds);
    return (1.0 - post.psi(i)) * mu;
  });
  return report;
}

FitReport fit_gls_naive(const GlsProblem& problem, double sigma_0_2,
                        const GlsFitOptions& options, Init init) {
  if (!(sigma_0_2 > 0.0) || !std::isfinite(sigma_0_2)) {
    throw AbsoluteContinuityViolation(
        "naive scheme needs sigma_0_2 > 0: KL to a zero-variance spike is undefined");
  }
  check_options(options);
  const Eigen::Index p = problem.dim();
  const double se2 = problem.sigma_e2();
  const double s12 = problem.sigma_1_2();
  const double s02 = sigma_0_2;
  const double prior_log_odds = std::log(problem.p0()) - std::log1p(-problem.p0());
  const double variance_log_ratio = 0.5 * std::log(s12 / s02);
  const double precision_gap = 0.5 * (1.0 / s02 - 1.0 / s12);
  const Eigen::MatrixXd& x = problem.corr();

  FitReport report;
  report.init = init;
  report.posterior = GlsPosterior{Eigen::VectorXd::Constant(p, initial_psi(init, problem.p0())),
                                  Eigen::VectorXd::Zero(p),
                                  Eigen::VectorXd::Constant(p, s12 + se2),
                                  NaiveScheme{sigma_0_2}};

  auto& post = report.posterior;
  run_sweeps(problem, options, report, [&](Eigen::Index i, double residual) {
    const double psi = post.psi(i);
    const double prior_prec = psi / s02 + (1.0 - psi) / s12;
    const double mu = residual / (se2 * prior_prec + x(i, i));
    const double s2 = 1.0 / (prior_prec + x(i, i) / se2);
    const double log_odds = clamp_log_odds(
        prior_log_odds + variance_log_ratio - precision_gap * (mu * mu + s2), &report.saturated);
    post.mu(i) = mu;
    post.s2(i) = s2;
    post.psi(i) = logistic(log_odds);
    return mu;
  });
  return report;
}

FitReport fit_gls_naive_best(const GlsProblem& problem, double sigma_0_2,
                             const GlsFitOptions& options) {
  FitReport spike = fit_gls_naive(problem, sigma_0_2, options, Init::Spike);
  FitReport slab = fit_gls_naive(problem, sigma_0_2, options, Init::Slab);
  return slab.elbo_trace.back() > spike.elbo_trace.back() ? slab : spike;
}

double expected_log_likelihood_gls(const GlsProblem& problem, const GlsPosterior& posterior) {
  const Eigen::Index p = problem.dim();
  if (posterior.psi.size() != p || posterior.mu.size() != p || posterior.s2.size() != p) {
    throw InvalidArgument("posterior dimension does not match problem");
  }
  const Eigen::MatrixXd& x = problem.corr();
  const Eigen::VectorXd mean = posterior.posterior_mean();
  const Eigen::VectorXd second = posterior.second_moment();
  // E[beta' X beta] under mean field: m' X m with the diagonal swapped for
  // second moments.
  const double quad = mean.dot(x * mean) +
                      (x.diagonal().array() * (second.array() - mean.array().square())).sum();
  return (problem.beta_hat().dot(mean) - 0.5 * quad) / problem.sigma_e2();
}

double elbo_gls(const GlsProblem& problem, const GlsPosterior& posterior) {
  const double loglik = expected_log_likelihood_gls(problem, posterior);
  const Eigen::Index p = problem.dim();
  const double p0 = problem.p0();
  double kl = 0.0;
  if (is_sparse(posterior.scheme)) {
    const SpikeSlabGaussian prior = problem.prior();
    for (Eigen::Index i = 0; i < p; ++i) {
      const SpikeSlabGaussian q(posterior.psi(i),
                                GaussianComponent(posterior.mu(i), posterior.s2(i)));
      kl += kl_spike_slab(q, prior);
    }
  } else {
    const double s02 = std::get<NaiveScheme>(posterior.scheme).sigma_0_2;
    if (!(s02 > 0.0)) {
      throw AbsoluteContinuityViolation("KL to a zero-variance spike is undefined");
    }
    const GaussianComponent spike(0.0, s02);
    const GaussianComponent slab(0.0, problem.sigma_1_2());
    for (Eigen::Index i = 0; i < p; ++i) {
      const double psi = posterior.psi(i);
      const GaussianComponent q(posterior.mu(i), posterior.s2(i));
      kl += kl_indicator_gaussian(psi, q, p0, spike, slab);
    }
  }
  return loglik - kl;
}

SpikeSlabGaussian exact_posterior_1d(double beta_hat, double p0, double sigma_e2,
                                     double sigma_1_2) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw InvalidArgument("p0 must lie in (0, 1)");
  if (!(sigma_e2 > 0.0) || !(sigma_1_2 > 0.0)) {
    throw InvalidArgument("variances must be positive");
  }
  // Marginal likelihood of beta_hat under each prior component.
  const GaussianComponent under_spike(0.0, sigma_e2);
  const GaussianComponent under_slab(0.0, sigma_e2 + sigma_1_2);
  const double slab_log_odds = std::log1p(-p0) - std::log(p0) +
                               under_slab.log_density(beta_hat) -
                               under_spike.log_density(beta_hat);
  const double spike_prob = logistic(-slab_log_odds);
  const double mean = beta_hat / (sigma_e2 / sigma_1_2 + 1.0);
  const double var = 1.0 / (1.0 / sigma_e2 + 1.0 / sigma_1_2);
  return SpikeSlabGaussian(spike_prob, GaussianComponent(mean, var));
}

std::vector<ThresholdRow> threshold_curve(double p0, double sigma_e2, double sigma_1_2,
                                          double sigma_0_2, std::span<const double> beta_hat_grid,
                                          const GlsFitOptions& options) {
  for (double b : beta_hat_grid) {
    if (!std::isfinite(b)) throw InvalidArgument("grid: non-finite value");
  }
  if (!std::is_sorted(beta_hat_grid.begin(), beta_hat_grid.end())) {
    throw InvalidArgument("grid: must be sorted");
  }
  std::vector<ThresholdRow> rows;
  rows.reserve(beta_hat_grid.size());
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  for (double b : beta_hat_grid) {
    const GlsProblem problem(Eigen::VectorXd::Constant(1, b), one, sigma_e2, sigma_1_2, p0);
    const FitReport naive = fit_gls_naive_best(problem, sigma_0_2, options);
    const FitReport sparse = fit_gls_sparse(problem, options);
    const Moments exact = spike_slab_moments(exact_posterior_1d(b, p0, sigma_e2, sigma_1_2));
    rows.push_back({b, naive.posterior.posterior_mean()(0), sparse.posterior.posterior_mean()(0),
                    exact.mean});
  }
  return rows;
}

}  // namespace spikeslab
