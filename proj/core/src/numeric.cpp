#include "spikeslab/numeric.hpp"

#include <algorithm>
#include <limits>

namespace spikeslab {

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_logistic(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double clamp_log_odds(double x, bool* saturated) {
  if (x > kLogOddsClamp || x < -kLogOddsClamp) {
    if (saturated != nullptr) *saturated = true;
    return std::clamp(x, -kLogOddsClamp, kLogOddsClamp);
  }
  return x;
}

}  // namespace spikeslab
