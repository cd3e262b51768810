#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace spikeslab {

// One exponential-family component restricted to its own support set.
//
// Its density with respect to the shared base measure is
//   exp(log_weight + <natural_params, sufficient_stats(x)> - log_partition)
//     * exp(log_base_density(x))
// for x with in_support(x), and zero elsewhere.
struct MixtureComponent {
  double log_weight = 0.0;
  Eigen::VectorXd natural_params;
  std::function<Eigen::VectorXd(double)> sufficient_stats;
  double log_partition = 0.0;
  std::function<double(double)> log_base_density;
  std::function<bool(double)> in_support;
};

// Mixture of exponential-family components with pairwise disjoint supports.
// Such a mixture is itself an exponential family; the `stacked_*` accessors
// expose that representation, with weight terms expressed relative to the
// last component.
class NonOverlappingMixture {
 public:
  // Throws InvalidArgument if the components are empty, a callable is
  // missing, a log partition is not finite, sufficient statistics do not
  // match natural parameter dimension, or the weights do not sum to one
  // within 1e-12.
  explicit NonOverlappingMixture(std::vector<MixtureComponent> components);

  std::size_t size() const noexcept { return components_.size(); }
  const MixtureComponent& component(std::size_t i) const { return components_.at(i); }

  // Index of the component whose support contains x, or size() if none.
  // Throws OverlappingSupport when two components accept x.
  std::size_t locate(double x) const;

  // Per-component form. -inf outside every support.
  double log_density(double x) const;

  // Single-family view: eta = (eta_1..eta_K, c_1..c_{K-1}) with
  // c_i = log pi_i - A_i - log pi_K + A_K; T(x) stacks the indicator-masked
  // statistics followed by the first K-1 indicators; A = A_K - log pi_K.
  // Throws DegenerateMixture if the last component has zero weight.
  Eigen::VectorXd stacked_natural_params() const;
  Eigen::VectorXd stacked_sufficient_stats(double x) const;
  double stacked_log_partition() const;
  double stacked_log_base_density(double x) const;
  double stacked_log_density(double x) const;

  // Test-time disjointness probe; throws OverlappingSupport on the first
  // probe accepted by two components.
  void check_disjoint(std::span<const double> probes) const;

 private:
  std::vector<MixtureComponent> components_;
  Eigen::Index stacked_stat_dim_ = 0;
};

double mixture_log_density(const NonOverlappingMixture& m, double x);

}  // namespace spikeslab
