#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Cholesky>
#include <gtest/gtest.h>

#include "quadrature.hpp"
#include "spikeslab/error.hpp"
#include "spikeslab/gls.hpp"

using namespace spikeslab;

namespace {

GlsProblem one_dim(double beta_hat, double p0 = 0.99, double sigma_e2 = 1.0, double sigma_1_2 = 1.0) {
  return GlsProblem(Eigen::VectorXd::Constant(1, beta_hat), Eigen::MatrixXd::Identity(1, 1),
                    sigma_e2, sigma_1_2, p0);
}

// Small Wishart-like correlation matrix with a planted sparse signal.
GlsProblem random_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  const int p = dim(rng);
  const int df = p + 5;
  Eigen::MatrixXd g(df, p);
  for (int i = 0; i < df; ++i)
    for (int j = 0; j < p; ++j) g(i, j) = z(rng);
  const Eigen::MatrixXd x = g.transpose() * g / df;
  const double sigma_e2 = 0.05 + u(rng);
  const double sigma_1_2 = 0.2 + 2.0 * u(rng);
  const double p0 = 0.5 + 0.49 * u(rng);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < p; ++j) {
    if (u(rng) > p0) beta(j) = std::sqrt(sigma_1_2) * z(rng);
  }
  Eigen::VectorXd noise(p);
  for (int j = 0; j < p; ++j) noise(j) = z(rng);
  const Eigen::LLT<Eigen::MatrixXd> llt(x);
  const Eigen::VectorXd lz = llt.matrixL() * noise;
  const Eigen::VectorXd beta_hat = x * beta + std::sqrt(sigma_e2) * lz;
  return GlsProblem(beta_hat, x, sigma_e2, sigma_1_2, p0);
}

void expect_monotone(const std::vector<double>& trace, double slack) {
  for (std::size_t t = 1; t < trace.size(); ++t) {
    EXPECT_GE(trace[t] - trace[t - 1], -slack * std::max(1.0, std::abs(trace[t - 1])))
        << "sweep " << t;
  }
}

// The P = 1 naive ELBo written out term by term, up to an additive constant.
double naive_elbo_1d(double beta_hat, double mu, double s2, double psi, double p0, double sigma_e2,
                     double sigma_0_2, double sigma_1_2) {
  const double m2 = mu * mu + s2;
  return -(m2 - 2.0 * beta_hat * mu) / (2.0 * sigma_e2) + 0.5 * std::log(s2) -
         psi * std::log(psi) - (1.0 - psi) * std::log(1.0 - psi) - 0.5 * psi * std::log(sigma_0_2) -
         0.5 * (1.0 - psi) * std::log(sigma_1_2) -
         (psi / (2.0 * sigma_0_2) + (1.0 - psi) / (2.0 * sigma_1_2)) * m2 + psi * std::log(p0) +
         (1.0 - psi) * std::log(1.0 - p0);
}

}  // namespace

TEST(GlsProblem, ValidationNamesField) {
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(2);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
  auto message = [](auto&& make) {
    try {
      make();
    } catch (const InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string("no throw");
  };
  EXPECT_NE(message([&] { GlsProblem(b, x, 1, 1, 1.0); }).find("p0"), std::string::npos);
  EXPECT_NE(message([&] { GlsProblem(b, x, -1, 1, 0.5); }).find("sigma_e2"), std::string::npos);
  EXPECT_NE(message([&] { GlsProblem(b, x, 1, 0, 0.5); }).find("sigma_1_2"), std::string::npos);
  Eigen::MatrixXd asym = x;
  asym(0, 1) = 0.3;
  EXPECT_NE(message([&] { GlsProblem(b, asym, 1, 1, 0.5); }).find("corr"), std::string::npos);
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  EXPECT_NE(message([&] { GlsProblem(b, indefinite, 1, 1, 0.5); }).find("corr"), std::string::npos);
  EXPECT_NE(message([&] { GlsProblem(Eigen::VectorXd::Ones(3), x, 1, 1, 0.5); }).find("corr"),
            std::string::npos);
  Eigen::VectorXd bad = b;
  bad(1) = NAN;
  EXPECT_NE(message([&] { GlsProblem(bad, x, 1, 1, 0.5); }).find("beta_hat"), std::string::npos);
}

TEST(FitGlsSparse, OneDimensionalExactness) {
  for (double beta_hat : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    const auto oracle = oracle::posterior_1d(beta_hat, 0.99, 1.0, 1.0);
    const auto fit = fit_gls_sparse(one_dim(beta_hat));
    EXPECT_NEAR(fit.posterior.psi(0), oracle.spike_prob, 1e-6) << beta_hat;
    EXPECT_NEAR(fit.posterior.posterior_mean()(0), oracle.mean,
                1e-6 * std::max(1e-3, std::abs(oracle.mean)))
        << beta_hat;
  }
}

TEST(FitGlsSparse, OneDimensionalExamples) {
  auto fit = fit_gls_sparse(one_dim(0.0));
  EXPECT_EQ(fit.posterior.mu(0), 0.0);
  EXPECT_GT(fit.posterior.psi(0), 0.99);
  fit = fit_gls_sparse(one_dim(2.0));
  EXPECT_NEAR(fit.posterior.mu(0), 1.0, 1e-15);
}

TEST(FitGlsSparse, DiagonalCorrelationIsSeparable) {
  Eigen::VectorXd beta_hat(3);
  beta_hat << 2.5, -0.4, 3.9;
  Eigen::VectorXd diag(3);
  diag << 0.5, 2.0, 1.3;
  const double sigma_e2 = 0.7, sigma_1_2 = 1.4, p0 = 0.9;
  const GlsProblem problem(beta_hat, diag.asDiagonal().toDenseMatrix(), sigma_e2, sigma_1_2, p0);
  const auto fit = fit_gls_sparse(problem);
  for (int i = 0; i < 3; ++i) {
    // beta_hat_i / d_i ~ N(beta_i, sigma_e2 / d_i).
    const auto q = oracle::grid_posterior(p0, 0.0, sigma_1_2, -0.5 * diag(i) / sigma_e2,
                                          beta_hat(i) / sigma_e2, -15, 15, 1e-4);
    EXPECT_NEAR(fit.posterior.psi(i), q.spike_prob, 1e-6) << i;
    EXPECT_NEAR(fit.posterior.posterior_mean()(i), q.mean, 1e-6) << i;
  }
}

TEST(FitGlsSparse, IdentityMatchesTwoOneDimensionalFits) {
  Eigen::VectorXd beta_hat(2);
  beta_hat << 1.7, 4.2;
  const auto fit = fit_gls_sparse(GlsProblem(beta_hat, Eigen::MatrixXd::Identity(2, 2), 1, 1, 0.99));
  for (int i = 0; i < 2; ++i) {
    const auto single = fit_gls_sparse(one_dim(beta_hat(i)));
    EXPECT_NEAR(fit.posterior.psi(i), single.posterior.psi(0), 1e-14);
    EXPECT_NEAR(fit.posterior.mu(i), single.posterior.mu(0), 1e-14);
    EXPECT_NEAR(fit.posterior.s2(i), single.posterior.s2(0), 1e-14);
  }
}

TEST(ExactPosterior1d, MatchesQuadrature) {
  for (double beta_hat : {-3.0, 0.0, 0.5, 2.0, 5.0}) {
    const auto exact = exact_posterior_1d(beta_hat, 0.99, 1.0, 1.0);
    const auto q = oracle::posterior_1d(beta_hat, 0.99, 1.0, 1.0);
    EXPECT_NEAR(exact.spike_prob(), q.spike_prob, 1e-8) << beta_hat;
    EXPECT_NEAR((1 - exact.spike_prob()) * exact.slab().mean(), q.mean, 1e-8) << beta_hat;
  }
  EXPECT_EQ(exact_posterior_1d(0.0, 0.99, 1.0, 1.0).slab().mean(), 0.0);
}

TEST(ExactPosterior1d, NoSparsityLimitIsGaussianShrinkage) {
  const auto d = exact_posterior_1d(3.0, 1e-12, 0.5, 2.0);
  EXPECT_NEAR((1 - d.spike_prob()) * d.slab().mean(), 3.0 / (0.5 / 2.0 + 1.0), 1e-9);
}

TEST(FitGls, ElboMonotoneOnRandomProblems) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 120; ++t) {
    const GlsProblem problem = random_problem(rng);
    const auto sparse = fit_gls_sparse(problem, {50, 0.0});
    expect_monotone(sparse.elbo_trace, 1e-8);
    const double s0 = std::pow(10.0, -1.0 - (t % 9));
    for (Init init : {Init::Spike, Init::Slab}) {
      const auto naive = fit_gls_naive(problem, s0, {50, 0.0}, init);
      expect_monotone(naive.elbo_trace, 1e-8);
    }
    EXPECT_LT(sparse.max_residual_drift, 1e-9);
  }
}

TEST(FitGls, ConvergedFitIsCoordinatewiseOptimal) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 5; ++t) {
    const GlsProblem problem = random_problem(rng);
    for (bool sparse : {true, false}) {
      const auto fit = sparse ? fit_gls_sparse(problem, {2000, 1e-13})
                              : fit_gls_naive(problem, 0.05, {2000, 1e-13}, Init::Slab);
      const GlsPosterior& q = fit.posterior;
      const double base = elbo_gls(problem, q);
      const double slack = 1e-9 * std::max(1.0, std::abs(base));
      for (Eigen::Index i = 0; i < problem.dim(); ++i) {
        for (double step : {-1e-3, 1e-3}) {
          GlsPosterior moved = q;
          moved.mu(i) += step;
          EXPECT_LE(elbo_gls(problem, moved), base + slack) << "mu " << i;
          moved = q;
          moved.s2(i) *= 1.0 + step;
          EXPECT_LE(elbo_gls(problem, moved), base + slack) << "s2 " << i;
          moved = q;
          moved.psi(i) = std::clamp(q.psi(i) + step * std::min(q.psi(i), 1 - q.psi(i)), 1e-300,
                                    1 - 1e-16);
          if (moved.psi(i) != q.psi(i)) {
            EXPECT_LE(elbo_gls(problem, moved), base + slack) << "psi " << i;
          }
        }
      }
    }
  }
}

TEST(ElboGls, NaiveOneDimensionalMatchesWrittenOutForm) {
  const double beta_hat = 1.3, p0 = 0.9, se = 0.8, s0 = 0.01, s1 = 1.5;
  const GlsProblem problem = one_dim(beta_hat, p0, se, s1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  GlsPosterior ref{Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 0.2),
                   Eigen::VectorXd::Constant(1, 0.3), NaiveScheme{s0}};
  const double ref_lib = elbo_gls(problem, ref);
  const double ref_direct = naive_elbo_1d(beta_hat, 0.2, 0.3, 0.5, p0, se, s0, s1);
  for (int t = 0; t < 20; ++t) {
    GlsPosterior q = ref;
    q.psi(0) = u(rng);
    q.mu(0) = 4.0 * (u(rng) - 0.5);
    q.s2(0) = u(rng);
    const double direct = naive_elbo_1d(beta_hat, q.mu(0), q.s2(0), q.psi(0), p0, se, s0, s1);
    EXPECT_NEAR(elbo_gls(problem, q) - ref_lib, direct - ref_direct, 1e-10);
  }
}

TEST(ElboGls, PriorAsPosteriorHasZeroKl) {
  Eigen::VectorXd beta_hat(2);
  beta_hat << 0.3, -0.1;
  Eigen::MatrixXd x(2, 2);
  x << 1, 0.2, 0.2, 1;
  const GlsProblem problem(beta_hat, x, 1e12, 1.0, 0.8);
  const GlsPosterior prior{Eigen::VectorXd::Constant(2, 0.8), Eigen::VectorXd::Zero(2),
                           Eigen::VectorXd::Ones(2), SparseScheme{}};
  EXPECT_NEAR(elbo_gls(problem, prior), expected_log_likelihood_gls(problem, prior), 1e-15);
}

TEST(FitGlsNaive, RejectsZeroSpikeVariance) {
  EXPECT_THROW(fit_gls_naive(one_dim(1.0), 0.0), AbsoluteContinuityViolation);
  EXPECT_THROW(fit_gls_naive(one_dim(1.0), -1.0), AbsoluteContinuityViolation);
  EXPECT_THROW(fit_gls_naive_best(one_dim(1.0), 0.0), AbsoluteContinuityViolation);
}

TEST(FitGlsNaive, EqualVariancesGiveRidgeFixedPoint) {
  std::mt19937_64 rng(8);
  const GlsProblem problem = random_problem(rng);
  const double s1 = problem.sigma_1_2(), se = problem.sigma_e2();
  const Eigen::MatrixXd precision =
      problem.corr() / se + Eigen::MatrixXd::Identity(problem.dim(), problem.dim()) / s1;
  const Eigen::VectorXd ridge = precision.llt().solve(problem.beta_hat() / se);
  for (Init init : {Init::Spike, Init::Slab}) {
    const auto fit = fit_gls_naive(problem, s1, {5000, 1e-15}, init);
    EXPECT_LT((fit.posterior.mu - ridge).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(FitGlsNaive, SmallSpikeVarianceLimits) {
  auto fit = fit_gls_naive_best(one_dim(0.0), 1e-10);
  EXPECT_GT(fit.posterior.psi(0), 1 - 1e-3);
  EXPECT_LT(std::abs(fit.posterior.mu(0)), 1e-6);
  fit = fit_gls_naive_best(one_dim(5.0), 1e-10);
  EXPECT_LT(fit.posterior.psi(0), 1e-3);
  EXPECT_NEAR(fit.posterior.mu(0), 2.5, 1e-6);
}

TEST(FitGlsNaive, BimodalOnThresholdGrid) {
  for (int i = 0; i <= 120; ++i) {
    const double beta_hat = 0.05 * i;
    for (double s0 : {1e-8, 1e-10}) {
      const auto fit = fit_gls_naive_best(one_dim(beta_hat), s0);
      const double psi = fit.posterior.psi(0);
      EXPECT_LT(std::min(psi, 1 - psi), 1e-3) << beta_hat << " " << s0;
    }
  }
}

TEST(FitGlsNaive, BestInitHasLargerElbo) {
  for (double beta_hat : {0.0, 3.0, 4.4, 4.6, 6.0}) {
    const auto spike = fit_gls_naive(one_dim(beta_hat), 1e-10, {}, Init::Spike);
    const auto slab = fit_gls_naive(one_dim(beta_hat), 1e-10, {}, Init::Slab);
    const auto best = fit_gls_naive_best(one_dim(beta_hat), 1e-10);
    EXPECT_EQ(best.elbo_trace.back(), std::max(spike.elbo_trace.back(), slab.elbo_trace.back()));
  }
}

TEST(FitGls, Deterministic) {
  std::mt19937_64 rng(3);
  const GlsProblem problem = random_problem(rng);
  const auto a = fit_gls_sparse(problem);
  const auto b = fit_gls_sparse(problem);
  EXPECT_EQ(a.posterior.psi, b.posterior.psi);
  EXPECT_EQ(a.posterior.mu, b.posterior.mu);
  EXPECT_EQ(a.elbo_trace, b.elbo_trace);
}

TEST(FitGls, RejectsBadOptions) {
  EXPECT_THROW(fit_gls_sparse(one_dim(1.0), {0, 1e-8}), InvalidArgument);
}

TEST(FitGls, SaturationIsFlagged) {
  const auto fit = fit_gls_sparse(one_dim(200.0, 0.99, 0.01, 1.0));
  EXPECT_TRUE(fit.saturated);
  EXPECT_LT(fit.posterior.psi(0), 1e-300);
  EXPECT_TRUE(std::isfinite(fit.elbo_trace.back()));
}

TEST(ThresholdCurve, ZeroGrid) {
  const std::vector<double> grid{0.0};
  const auto rows = threshold_curve(0.99, 1, 1, 1e-10, grid);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].naive_mean, 0.0);
  EXPECT_EQ(rows[0].sparse_mean, 0.0);
  EXPECT_EQ(rows[0].exact_mean, 0.0);
}

TEST(ThresholdCurve, SparseEqualsExactAndExactIsSmooth) {
  std::vector<double> grid;
  for (int i = 0; i <= 120; ++i) grid.push_back(0.05 * i);
  const auto rows = threshold_curve(0.99, 1, 1, 1e-10, grid);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(rows[i].sparse_mean, rows[i].exact_mean, 1e-6);
    const auto q = oracle::posterior_1d(rows[i].beta_hat, 0.99, 1, 1);
    EXPECT_NEAR(rows[i].exact_mean, q.mean, 1e-6);
    if (i > 0) {
      EXPECT_GT(rows[i].exact_mean, rows[i - 1].exact_mean);
      EXPECT_LT((rows[i].exact_mean - rows[i - 1].exact_mean) / 0.05, 2.0);
    }
  }
}

TEST(ThresholdCurve, RejectsUnsortedOrNonFiniteGrid) {
  const std::vector<double> unsorted{1.0, 0.5};
  EXPECT_THROW(threshold_curve(0.99, 1, 1, 1e-10, unsorted), InvalidArgument);
  const std::vector<double> bad{0.0, NAN};
  EXPECT_THROW(threshold_curve(0.99, 1, 1, 1e-10, bad), InvalidArgument);
}
