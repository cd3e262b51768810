#pragma once

#include "spikeslab/mixture.hpp"

namespace spikeslab {

// Univariate Gaussian, parameterized by mean and variance.
class GaussianComponent {
 public:
  // Throws InvalidArgument unless variance > 0 and both values are finite.
  GaussianComponent(double mean, double variance);

  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }

  double log_density(double x) const;

  friend bool operator==(const GaussianComponent&, const GaussianComponent&) = default;

 private:
  double mean_;
  double variance_;
};

// Point mass at zero with probability spike_prob, Gaussian slab otherwise.
//
// Densities are taken with respect to Lebesgue measure plus a unit atom at
// zero, so the spike contributes log(spike_prob) at x == 0 and the slab
// contributes nothing there.
class SpikeSlabGaussian {
 public:
  // Throws InvalidArgument unless 0 <= spike_prob <= 1.
  SpikeSlabGaussian(double spike_prob, GaussianComponent slab);

  double spike_prob() const noexcept { return spike_prob_; }
  const GaussianComponent& slab() const noexcept { return slab_; }

  friend bool operator==(const SpikeSlabGaussian&, const SpikeSlabGaussian&) = default;

 private:
  double spike_prob_;
  GaussianComponent slab_;
};

// Gaussian-form log-likelihood a*x^2 + b*x + const in the unknown x.
struct GaussianLikelihoodEvidence {
  double precision_coeff = 0.0;  // a, coefficient of x^2
  double linear_coeff = 0.0;     // b, coefficient of x

  GaussianLikelihoodEvidence& operator+=(const GaussianLikelihoodEvidence& o) {
    precision_coeff += o.precision_coeff;
    linear_coeff += o.linear_coeff;
    return *this;
  }
};

// Evidence about x contributed by one observation y ~ N(x, noise_variance).
GaussianLikelihoodEvidence gaussian_observation_evidence(double y, double noise_variance);

struct Moments {
  double mean;
  double second_moment;
};

Moments spike_slab_moments(const SpikeSlabGaussian& d);

// Extended-real log density; -inf where the relevant weight is zero.
double spike_slab_log_density(const SpikeSlabGaussian& d, double x);

// Two-component natural form: component 0 is the atom at zero (no sufficient
// statistics), component 1 the slab on R \ {0} with statistics (x, x^2) and
// natural parameters (mu / s^2, -1 / (2 s^2)).
// Throws DegenerateMixture when spike_prob is 0 or 1.
NonOverlappingMixture spike_slab_to_natural(const SpikeSlabGaussian& d);

// Exact posterior of `prior` under the log-likelihood described by `evidence`.
// The spike keeps unit likelihood (the log-likelihood vanishes at x = 0), the
// slab is reweighted by its Gaussian marginal normalizer. Requires
// 1/slab.variance - 2 a > 0; throws InvalidArgument otherwise.
SpikeSlabGaussian conjugate_update_spike_slab(const SpikeSlabGaussian& prior,
                                              const GaussianLikelihoodEvidence& evidence);

double kl_gaussian(const GaussianComponent& q, const GaussianComponent& p);

// KL(q || p). Both share the atom at zero, so the divergence splits into a
// Bernoulli term plus the slab divergence weighted by q's slab mass.
// Throws AbsoluteContinuityViolation when q charges a part p gives no mass.
double kl_spike_slab(const SpikeSlabGaussian& q, const SpikeSlabGaussian& p);

// KL(q(Y) q(x) || p(Y) p(x | Y)) for an indicator Y with q(Y = 0) = psi,
// p(Y = 0) = p0, and Gaussian x with p(x | Y = 0) = narrow,
// p(x | Y = 1) = wide.
double kl_indicator_gaussian(double psi, const GaussianComponent& q, double p0,
                             const GaussianComponent& narrow, const GaussianComponent& wide);

}  // namespace spikeslab
