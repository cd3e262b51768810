#include "spikeslab/mixture.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spikeslab/error.hpp"
#include "spikeslab/numeric.hpp"

namespace spikeslab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

NonOverlappingMixture::NonOverlappingMixture(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("mixture needs at least one component");
  std::vector<double> log_weights;
  log_weights.reserve(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    const std::string tag = "component " + std::to_string(i);
    if (!c.sufficient_stats || !c.log_base_density || !c.in_support) {
      throw InvalidArgument(tag + " is missing a callable");
    }
    if (!std::isfinite(c.log_partition)) {
      throw InvalidArgument(tag + " has a non-finite log partition");
    }
    if (std::isnan(c.log_weight) || c.log_weight > 0.0) {
      throw InvalidArgument(tag + " has an invalid log weight");
    }
    log_weights.push_back(c.log_weight);
    stacked_stat_dim_ += c.natural_params.size();
  }
  const double total = log_sum_exp(log_weights);
  if (!(std::abs(std::exp(total) - 1.0) <= 1e-12)) {
    throw InvalidArgument("mixture weights do not sum to one");
  }
}

std::size_t NonOverlappingMixture::locate(double x) const {
  std::size_t found = components_.size();
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (!components_[i].in_support(x)) continue;
    if (found != components_.size()) {
      throw OverlappingSupport("components " + std::to_string(found) + " and " +
                               std::to_string(i) + " both accept x=" + std::to_string(x));
    }
    found = i;
  }
  return found;
}

double NonOverlappingMixture::log_density(double x) const {
  const std::size_t i = locate(x);
  if (i == components_.size()) return kNegInf;
  const auto& c = components_[i];
  if (c.log_weight == kNegInf) return kNegInf;
  double inner = 0.0;
  if (c.natural_params.size() > 0) inner = c.natural_params.dot(c.sufficient_stats(x));
  return c.log_weight + inner - c.log_partition + c.log_base_density(x);
}

Eigen::VectorXd NonOverlappingMixture::stacked_natural_params() const {
  const auto& last = components_.back();
  if (last.log_weight == kNegInf) {
    throw DegenerateMixture("stacked form needs a positive weight on the last component");
  }
  const auto k = static_cast<Eigen::Index>(components_.size());
  Eigen::VectorXd eta(stacked_stat_dim_ + k - 1);
  Eigen::Index pos = 0;
  for (const auto& c : components_) {
    eta.segment(pos, c.natural_params.size()) = c.natural_params;
    pos += c.natural_params.size();
  }
  for (Eigen::Index i = 0; i + 1 < k; ++i) {
    const auto& c = components_[static_cast<std::size_t>(i)];
    eta(pos++) = c.log_weight - c.log_partition - last.log_weight + last.log_partition;
  }
  return eta;
}

Eigen::VectorXd NonOverlappingMixture::stacked_sufficient_stats(double x) const {
  const std::size_t owner = locate(x);
  const auto k = static_cast<Eigen::Index>(components_.size());
  Eigen::VectorXd t = Eigen::VectorXd::Zero(stacked_stat_dim_ + k - 1);
  Eigen::Index pos = 0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    if (i == owner && c.natural_params.size() > 0) {
      t.segment(pos, c.natural_params.size()) = c.sufficient_stats(x);
    }
    pos += c.natural_params.size();
  }
  if (owner + 1 < components_.size()) t(pos + static_cast<Eigen::Index>(owner)) = 1.0;
  return t;
}

double NonOverlappingMixture::stacked_log_partition() const {
  const auto& last = components_.back();
  if (last.log_weight == kNegInf) {
    throw DegenerateMixture("stacked form needs a positive weight on the last component");
  }
  return last.log_partition - last.log_weight;
}

double NonOverlappingMixture::stacked_log_base_density(double x) const {
  const std::size_t owner = locate(x);
  // 0^0 = 1 for the components that do not own x.
  if (owner == components_.size()) return 0.0;
  return components_[owner].log_base_density(x);
}

double NonOverlappingMixture::stacked_log_density(double x) const {
  if (locate(x) == components_.size()) return kNegInf;
  return stacked_natural_params().dot(stacked_sufficient_stats(x)) - stacked_log_partition() +
         stacked_log_base_density(x);
}

void NonOverlappingMixture::check_disjoint(std::span<const double> probes) const {
  for (double x : probes) (void)locate(x);
}

double mixture_log_density(const NonOverlappingMixture& m, double x) { return m.log_density(x); }

}  // namespace spikeslab
