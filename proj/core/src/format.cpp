#include "spikeslab/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "spikeslab/scheme.hpp"

namespace spikeslab {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string scheme_name(const Scheme& s) {
  if (const auto* naive = std::get_if<NaiveScheme>(&s)) {
    return "naive(sigma0=" + format_double(naive->sigma_0_2) + ")";
  }
  return "sparse";
}

}  // namespace spikeslab
