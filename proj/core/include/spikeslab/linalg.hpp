#pragma once

#include <Eigen/Core>

namespace spikeslab {

// Leading k singular triples, data ~= u * diag(values) * v^T.
//
// Sign convention: every column of u has its largest-magnitude entry
// positive (first such entry on ties); the matching column of v flips with
// it.
struct TruncatedSvd {
  Eigen::MatrixXd u;       // N x k
  Eigen::VectorXd values;  // k, descending
  Eigen::MatrixXd v;       // P x k
};

// Throws InvalidArgument for k < 1 or k > min(N, P), RankDeficient when the
// k-th singular value is numerically zero.
TruncatedSvd truncated_svd(const Eigen::MatrixXd& data, int k);

// Flips column signs of `u` (and `v` alongside) so that each column's
// largest-magnitude entry is positive.
void apply_sign_convention(Eigen::MatrixXd& u, Eigen::MatrixXd& v);

// Symmetric within `tol` (absolute, entrywise).
bool is_symmetric(const Eigen::MatrixXd& m, double tol);

// Cholesky of m + jitter * I succeeds.
bool is_positive_semidefinite(const Eigen::MatrixXd& m, double jitter = 1e-10);

}  // namespace spikeslab
