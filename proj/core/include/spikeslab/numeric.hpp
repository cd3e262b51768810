#pragma once

#include <cmath>
#include <numbers>
#include <span>

namespace spikeslab {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Log-odds beyond this magnitude are clamped before exponentiation.
inline constexpr double kLogOddsClamp = 700.0;

double log_sum_exp(std::span<const double> values);
double log_sum_exp(double a, double b);

// 1 / (1 + exp(-x)) without overflow in either tail.
double logistic(double x);

// log(logistic(x)), accurate for large |x|.
double log_logistic(double x);

// x log x with the convention 0 log 0 = 0.
double xlogx(double x);

// Clamps x to [-kLogOddsClamp, kLogOddsClamp]; sets *saturated when clamping
// happened (the flag is never cleared).
double clamp_log_odds(double x, bool* saturated);

inline bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace spikeslab
