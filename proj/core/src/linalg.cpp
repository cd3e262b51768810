#include "spikeslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "spikeslab/error.hpp"

namespace spikeslab {

void apply_sign_convention(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const double a = std::abs(u(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (u.rows() > 0 && u(arg, j) < 0.0) {
      u.col(j) *= -1.0;
      if (j < v.cols()) v.col(j) *= -1.0;
    }
  }
}

TruncatedSvd truncated_svd(const Eigen::MatrixXd& data, int k) {
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  if (k < 1 || k > std::min(n, p)) throw InvalidArgument("k must lie in [1, min(N, P)]");
  if (!data.allFinite()) throw InvalidArgument("data contains non-finite entries");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double top = sv.size() > 0 ? sv(0) : 0.0;
  const double floor =
      static_cast<double>(std::max(n, p)) * std::numeric_limits<double>::epsilon() * top;
  if (!(top > 0.0) || !(sv(k - 1) > floor)) {
    throw RankDeficient("data has numerical rank below " + std::to_string(k));
  }
  TruncatedSvd out{svd.matrixU().leftCols(k), sv.head(k), svd.matrixV().leftCols(k)};
  apply_sign_convention(out.u, out.v);
  return out;
}

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return ((m - m.transpose()).cwiseAbs().maxCoeff() <= tol);
}

bool is_positive_semidefinite(const Eigen::MatrixXd& m, double jitter) {
  if (m.rows() != m.cols()) return false;
  Eigen::MatrixXd shifted = m;
  shifted.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  return llt.info() == Eigen::Success;
}

}  // namespace spikeslab
