#pragma once

#include <string>
#include <variant>

namespace spikeslab {

// Spike-and-slab variational factors (exact treatment of the point mass).
struct SparseScheme {
  friend bool operator==(const SparseScheme&, const SparseScheme&) = default;
};

// Auxiliary-indicator scheme: the spike is replaced by N(0, sigma_0_2) and
// the variational factor for each effect is a single Gaussian.
struct NaiveScheme {
  double sigma_0_2 = 0.0;
  friend bool operator==(const NaiveScheme&, const NaiveScheme&) = default;
};

using Scheme = std::variant<SparseScheme, NaiveScheme>;

inline bool is_sparse(const Scheme& s) { return std::holds_alternative<SparseScheme>(s); }

// "sparse" or "naive(sigma0=<value>)".
std::string scheme_name(const Scheme& s);

}  // namespace spikeslab
