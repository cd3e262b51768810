#pragma once

#include <Eigen/Core>

namespace spikeslab::sim {

// Mean of squared differences. Throws InvalidArgument on length mismatch.
double metric_mse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

// Pearson correlation. Throws CorrelationUndefined if either side has zero
// variance.
double metric_corr(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth);

// Squared Frobenius norm of the difference.
double metric_reconstruction(const Eigen::MatrixXd& reconstruction, const Eigen::MatrixXd& signal);

// Fraction of entries with |value| < threshold.
double fraction_below(const Eigen::MatrixXd& values, double threshold);

}  // namespace spikeslab::sim
