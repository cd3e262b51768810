#pragma once

// Test-only numerical oracles. Nothing here calls the closed forms under
// test.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

namespace spikeslab::oracle {

struct GridPosterior {
  double spike_prob;
  double slab_mean;
  double slab_var;
  double mean;           // of the whole posterior
  double second_moment;  // of the whole posterior
};

inline double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * d * d / var;
}

// Posterior of p0 delta_0 + (1 - p0) N(m0, v0) under the likelihood
// exp(a x^2 + b x), integrating the slab part by the trapezoid rule on
// [lo, hi] with spacing h.
inline GridPosterior grid_posterior(double p0, double m0, double v0, double a, double b, double lo,
                                    double hi, double h) {
  const auto n = static_cast<long>(std::llround((hi - lo) / h));
  auto log_f = [&](double x) { return log_normal_pdf(x, m0, v0) + a * x * x + b * x; };
  double peak = -INFINITY;
  for (long i = 0; i <= n; ++i) peak = std::max(peak, log_f(lo + static_cast<double>(i) * h));
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double x = lo + static_cast<double>(i) * h;
    const double w = (i == 0 || i == n) ? 0.5 * h : h;
    const double f = std::exp(log_f(x) - peak) * w;
    z += f;
    m1 += f * x;
    m2 += f * x * x;
  }
  const double log_slab = std::log1p(-p0) + peak + std::log(z);
  const double log_spike = std::log(p0);
  const double spike = 1.0 / (1.0 + std::exp(log_slab - log_spike));
  GridPosterior out;
  out.spike_prob = spike;
  out.slab_mean = m1 / z;
  out.slab_var = m2 / z - out.slab_mean * out.slab_mean;
  out.mean = (1.0 - spike) * out.slab_mean;
  out.second_moment = (1.0 - spike) * m2 / z;
  return out;
}

// Exact 1-D posterior for beta_hat ~ N(beta, sigma_e2) under the
// spike-and-slab prior, by quadrature on [-12, 12] with step 1e-4.
inline GridPosterior posterior_1d(double beta_hat, double p0, double sigma_e2, double sigma_1_2) {
  return grid_posterior(p0, 0.0, sigma_1_2, -0.5 / sigma_e2, beta_hat / sigma_e2, -12.0, 12.0, 1e-4);
}

// Nodes and weights for the integral of exp(-x^2) f(x) by Golub-Welsch.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussHermite(int n) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      j(i, i - 1) = j(i - 1, i) = std::sqrt(static_cast<double>(i) / 2.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(j);
    for (int i = 0; i < n; ++i) {
      nodes.push_back(eig.eigenvalues()(i));
      const double v0 = eig.eigenvectors()(0, i);
      weights.push_back(std::sqrt(std::numbers::pi) * v0 * v0);
    }
  }

  // E[f(X)] for X ~ N(mean, var).
  double expect(double mean, double var, const std::function<double(double)>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      s += weights[i] * f(mean + std::sqrt(2.0 * var) * nodes[i]);
    }
    return s / std::sqrt(std::numbers::pi);
  }
};

}  // namespace spikeslab::oracle
