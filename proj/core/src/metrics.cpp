#include "spikeslab/metrics.hpp"

#include <cmath>

#include "spikeslab/error.hpp"

namespace spikeslab::sim {

double metric_mse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size() || truth.size() == 0) {
    throw InvalidArgument("mse: vectors must be non-empty and of equal length");
  }
  return (estimate - truth).squaredNorm() / static_cast<double>(truth.size());
}

double metric_corr(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size() || truth.size() < 2) {
    throw InvalidArgument("corr: vectors must have equal length of at least 2");
  }
  const Eigen::ArrayXd a = estimate.array() - estimate.mean();
  const Eigen::ArrayXd b = truth.array() - truth.mean();
  const double saa = a.square().sum();
  const double sbb = b.square().sum();
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    throw CorrelationUndefined("correlation undefined for a constant vector");
  }
  const double r = (a * b).sum() / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

double metric_reconstruction(const Eigen::MatrixXd& reconstruction, const Eigen::MatrixXd& signal) {
  if (reconstruction.rows() != signal.rows() || reconstruction.cols() != signal.cols()) {
    throw InvalidArgument("reconstruction: shape mismatch");
  }
  return (reconstruction - signal).squaredNorm();
}

double fraction_below(const Eigen::MatrixXd& values, double threshold) {
  if (values.size() == 0) return 0.0;
  return static_cast<double>((values.array().abs() < threshold).count()) /
         static_cast<double>(values.size());
}

}  // namespace spikeslab::sim
