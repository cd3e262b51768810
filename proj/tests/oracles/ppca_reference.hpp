#pragma once

// Mean-field probabilistic PCA with a plain Gaussian N(0, prior_var) prior
// on every loading, written with explicit loops. Same sweep order as the
// library: scores as a block, then loadings row by row.

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace spikeslab::oracle {

struct GaussianPpca {
  Eigen::MatrixXd mu_z, cov_z, mu_w, var_w;
};

inline GaussianPpca gaussian_ppca(const Eigen::MatrixXd& x, Eigen::MatrixXd mu_z,
                                  Eigen::MatrixXd mu_w, Eigen::MatrixXd var_w, double noise_var,
                                  double prior_var, int sweeps) {
  const Eigen::Index n = x.rows(), p = x.cols(), k = mu_w.cols();
  GaussianPpca s{std::move(mu_z), Eigen::MatrixXd::Identity(k, k), std::move(mu_w),
                 std::move(var_w)};
  for (int t = 0; t < sweeps; ++t) {
    Eigen::MatrixXd ewtw = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index r = 0; r < p; ++r) {
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) ewtw(a, b) += s.mu_w(r, a) * s.mu_w(r, b);
        ewtw(a, a) += s.var_w(r, a);
      }
    }
    const Eigen::MatrixXd precision =
        ewtw / noise_var + Eigen::MatrixXd::Identity(k, k);
    s.cov_z = precision.llt().solve(Eigen::MatrixXd::Identity(k, k));
    s.mu_z = x * s.mu_w * s.cov_z / noise_var;
    Eigen::MatrixXd ezz = n * s.cov_z;
    for (Eigen::Index i = 0; i < n; ++i) ezz += s.mu_z.row(i).transpose() * s.mu_z.row(i);
    for (Eigen::Index r = 0; r < p; ++r) {
      for (Eigen::Index a = 0; a < k; ++a) {
        double lin = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) lin += x(i, r) * s.mu_z(i, a);
        for (Eigen::Index b = 0; b < k; ++b) {
          if (b != a) lin -= s.mu_w(r, b) * ezz(a, b);
        }
        s.var_w(r, a) = 1.0 / (ezz(a, a) / noise_var + 1.0 / prior_var);
        s.mu_w(r, a) = s.var_w(r, a) * lin / noise_var;
      }
    }
  }
  return s;
}

}  // namespace spikeslab::oracle
