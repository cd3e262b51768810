#include "spikeslab/spike_slab.hpp"

#include <cmath>
#include <limits>

#include "spikeslab/error.hpp"
#include "spikeslab/numeric.hpp"

namespace spikeslab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

GaussianComponent::GaussianComponent(double mean, double variance)
    : mean_(mean), variance_(variance) {
  if (!std::isfinite(mean) || !std::isfinite(variance) || !(variance > 0.0)) {
    throw InvalidArgument("Gaussian component needs finite mean and positive finite variance");
  }
}

double GaussianComponent::log_density(double x) const {
  const double d = x - mean_;
  return -0.5 * (kLog2Pi + std::log(variance_) + d * d / variance_);
}

SpikeSlabGaussian::SpikeSlabGaussian(double spike_prob, GaussianComponent slab)
    : spike_prob_(spike_prob), slab_(slab) {
  if (!(spike_prob >= 0.0 && spike_prob <= 1.0)) {
    throw InvalidArgument("spike probability must lie in [0, 1]");
  }
}

GaussianLikelihoodEvidence gaussian_observation_evidence(double y, double noise_variance) {
  if (!(noise_variance > 0.0)) throw InvalidArgument("noise variance must be positive");
  return {-0.5 / noise_variance, y / noise_variance};
}

Moments spike_slab_moments(const SpikeSlabGaussian& d) {
  const double w = 1.0 - d.spike_prob();
  const double m = d.slab().mean();
  return {w * m, w * (m * m + d.slab().variance())};
}

double spike_slab_log_density(const SpikeSlabGaussian& d, double x) {
  if (x == 0.0) return d.spike_prob() > 0.0 ? std::log(d.spike_prob()) : kNegInf;
  const double w = 1.0 - d.spike_prob();
  if (w <= 0.0) return kNegInf;
  return std::log(w) + d.slab().log_density(x);
}

NonOverlappingMixture spike_slab_to_natural(const SpikeSlabGaussian& d) {
  const double psi = d.spike_prob();
  if (psi <= 0.0 || psi >= 1.0) {
    throw DegenerateMixture("spike probability in {0, 1} has no mixture natural form");
  }
  const double mu = d.slab().mean();
  const double s2 = d.slab().variance();

  MixtureComponent spike;
  spike.log_weight = std::log(psi);
  spike.natural_params = Eigen::VectorXd(0);
  spike.sufficient_stats = [](double) { return Eigen::VectorXd(0); };
  spike.log_partition = 0.0;
  spike.log_base_density = [](double) { return 0.0; };
  spike.in_support = [](double x) { return x == 0.0; };

  MixtureComponent slab;
  slab.log_weight = std::log1p(-psi);
  slab.natural_params = Eigen::Vector2d(mu / s2, -0.5 / s2);
  slab.sufficient_stats = [](double x) { return Eigen::VectorXd(Eigen::Vector2d(x, x * x)); };
  slab.log_partition = 0.5 * mu * mu / s2 + 0.5 * std::log(s2);
  slab.log_base_density = [](double) { return -0.5 * kLog2Pi; };
  slab.in_support = [](double x) { return x != 0.0 && std::isfinite(x); };

  return NonOverlappingMixture({std::move(spike), std::move(slab)});
}

SpikeSlabGaussian conjugate_update_spike_slab(const SpikeSlabGaussian& prior,
                                              const GaussianLikelihoodEvidence& evidence) {
  const double prior_prec = 1.0 / prior.slab().variance();
  const double post_prec = prior_prec - 2.0 * evidence.precision_coeff;
  if (!(post_prec > 0.0) || !std::isfinite(post_prec)) {
    throw InvalidArgument("evidence leaves a non-positive slab precision");
  }
  const double s2 = 1.0 / post_prec;
  const double prior_mean = prior.slab().mean();
  const double mu = s2 * (evidence.linear_coeff + prior_mean * prior_prec);

  // log of the slab's normalizer: integral of N(x; m0, v0) exp(a x^2 + b x).
  const double log_norm = 0.5 * std::log(s2 * prior_prec) + 0.5 * mu * mu / s2 -
                          0.5 * prior_mean * prior_mean * prior_prec;

  const double psi = prior.spike_prob();
  double post_psi = psi;
  if (psi > 0.0 && psi < 1.0) {
    post_psi = logistic(std::log(psi) - std::log1p(-psi) - log_norm);
  }
  return SpikeSlabGaussian(post_psi, GaussianComponent(mu, s2));
}

double kl_gaussian(const GaussianComponent& q, const GaussianComponent& p) {
  const double ratio = q.variance() / p.variance();
  const double d = q.mean() - p.mean();
  return 0.5 * (ratio - 1.0 - std::log(ratio) + d * d / p.variance());
}

double kl_spike_slab(const SpikeSlabGaussian& q, const SpikeSlabGaussian& p) {
  const double qs = q.spike_prob();
  const double ps = p.spike_prob();
  if ((ps == 0.0 && qs > 0.0) || (ps == 1.0 && qs < 1.0)) {
    throw AbsoluteContinuityViolation("q places mass where p has none");
  }
  double kl = 0.0;
  if (qs > 0.0) kl += qs * (std::log(qs) - std::log(ps));
  if (qs < 1.0) {
    kl += (1.0 - qs) * (std::log1p(-qs) - std::log1p(-ps));
    kl += (1.0 - qs) * kl_gaussian(q.slab(), p.slab());
  }
  return kl;
}

double kl_indicator_gaussian(double psi, const GaussianComponent& q, double p0,
                             const GaussianComponent& narrow, const GaussianComponent& wide) {
  double kl = xlogx(psi) - psi * std::log(p0) + xlogx(1.0 - psi) - (1.0 - psi) * std::log1p(-p0);
  if (psi > 0.0) kl += psi * kl_gaussian(q, narrow);
  if (psi < 1.0) kl += (1.0 - psi) * kl_gaussian(q, wide);
  return kl;
}

}  // namespace spikeslab
