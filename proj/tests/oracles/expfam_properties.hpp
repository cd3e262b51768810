#pragma once

// Randomized identities for the spike-and-slab exponential-family layer.
// Each check returns how many instances ran, how many failed and the worst
// error seen, so both the unit tests and the acceptance binary can report.

#include <cmath>
#include <random>
#include <string>

#include "quadrature.hpp"
#include "spikeslab/mixture.hpp"
#include "spikeslab/spike_slab.hpp"

namespace spikeslab::oracle {

struct PropertyReport {
  int instances = 0;
  int failures = 0;
  double worst = 0.0;

  void record(double error, double tol) {
    ++instances;
    worst = std::max(worst, error);
    if (!(error <= tol)) ++failures;
  }
  bool ok(int min_instances) const { return failures == 0 && instances >= min_instances; }
};

inline SpikeSlabGaussian random_spike_slab(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> prob(0.01, 0.99), mean(-3.0, 3.0), logvar(-1.5, 1.5);
  return SpikeSlabGaussian(prob(rng), GaussianComponent(mean(rng), std::exp(logvar(rng))));
}

// Natural-form log density equals the direct form on a dense grid
// including zero (tolerance 1e-10).
inline PropertyReport check_density_form(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PropertyReport report;
  for (int t = 0; t < instances; ++t) {
    const SpikeSlabGaussian d = random_spike_slab(rng);
    const NonOverlappingMixture m = spike_slab_to_natural(d);
    double worst = 0.0;
    for (int i = -60; i <= 60; ++i) {
      const double x = 0.1 * i;
      const double direct = spike_slab_log_density(d, x);
      worst = std::max({worst, std::abs(mixture_log_density(m, x) - direct),
                        std::abs(m.stacked_log_density(x) - direct)});
    }
    report.record(worst, 1e-10);
  }
  return report;
}

// Spike mass plus slab quadrature mass on mean +- 12 sd is one (1e-8).
inline PropertyReport check_normalization(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PropertyReport report;
  for (int t = 0; t < instances; ++t) {
    const SpikeSlabGaussian d = random_spike_slab(rng);
    const double mu = d.slab().mean();
    const double sd = std::sqrt(d.slab().variance());
    const int n = 24000;
    const double h = 24.0 * sd / n;
    double mass = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = mu - 12.0 * sd + i * h;
      if (x == 0.0) continue;
      const double w = (i == 0 || i == n) ? 0.5 * h : h;
      mass += w * std::exp(spike_slab_log_density(d, x));
    }
    report.record(std::abs(d.spike_prob() + mass - 1.0), 1e-8);
  }
  return report;
}

// conjugate_update_spike_slab against the quadrature-normalized product:
// |d psi| < 1e-6, slab mean and variance relative 1e-5.
inline PropertyReport check_conjugacy_closure(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> y_dist(-4.0, 4.0), logv(-1.0, 1.0);
  PropertyReport report;
  for (int t = 0; t < instances; ++t) {
    const SpikeSlabGaussian prior = random_spike_slab(rng);
    const double y = y_dist(rng);
    const double v = std::exp(logv(rng));
    const GaussianLikelihoodEvidence ev = gaussian_observation_evidence(y, v);
    const SpikeSlabGaussian post = conjugate_update_spike_slab(prior, ev);
    // The likelihood exp(a x^2 + b x) is 1 at zero, matching the spike's
    // unit likelihood in the closed form.
    const GridPosterior q = grid_posterior(prior.spike_prob(), prior.slab().mean(),
                                           prior.slab().variance(), ev.precision_coeff,
                                           ev.linear_coeff, -30.0, 30.0, 1e-3);
    const double e_psi = std::abs(post.spike_prob() - q.spike_prob) / 1e-6;
    const double e_mean = std::abs(post.slab().mean() - q.slab_mean) /
                          (1e-5 * std::max(1.0, std::abs(q.slab_mean)));
    const double e_var = std::abs(post.slab().variance() - q.slab_var) / (1e-5 * q.slab_var);
    report.record(std::max({e_psi, e_mean, e_var}), 1.0);
  }
  return report;
}

// Two updates equal one update with summed evidence (1e-10).
inline PropertyReport check_sequential_update(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> y_dist(-4.0, 4.0), logv(-1.0, 1.0);
  PropertyReport report;
  for (int t = 0; t < instances; ++t) {
    const SpikeSlabGaussian prior = random_spike_slab(rng);
    const auto e1 = gaussian_observation_evidence(y_dist(rng), std::exp(logv(rng)));
    const auto e2 = gaussian_observation_evidence(y_dist(rng), std::exp(logv(rng)));
    GaussianLikelihoodEvidence both = e1;
    both += e2;
    const auto two = conjugate_update_spike_slab(conjugate_update_spike_slab(prior, e1), e2);
    const auto one = conjugate_update_spike_slab(prior, both);
    const double err = std::max({std::abs(two.spike_prob() - one.spike_prob()),
                                 std::abs(two.slab().mean() - one.slab().mean()),
                                 std::abs(two.slab().variance() - one.slab().variance())});
    report.record(err, 1e-10);
  }
  return report;
}

// KL >= 0, KL(q || q) = 0, and agreement with a quadrature of the slab part.
inline PropertyReport check_kl(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const GaussHermite gh(64);
  PropertyReport report;
  for (int t = 0; t < instances; ++t) {
    const SpikeSlabGaussian q = random_spike_slab(rng);
    const SpikeSlabGaussian p = random_spike_slab(rng);
    const double kl = kl_spike_slab(q, p);
    const double self = kl_spike_slab(q, q);
    const double psi = q.spike_prob();
    const double slab_part = gh.expect(q.slab().mean(), q.slab().variance(), [&](double x) {
      return q.slab().log_density(x) - p.slab().log_density(x);
    });
    const double expected = psi * std::log(psi / p.spike_prob()) +
                            (1.0 - psi) * std::log((1.0 - psi) / (1.0 - p.spike_prob())) +
                            (1.0 - psi) * slab_part;
    const double err = std::max(std::abs(kl - expected), std::abs(self));
    report.record(kl >= -1e-12 ? err : INFINITY, 1e-9);
  }
  return report;
}

}  // namespace spikeslab::oracle
