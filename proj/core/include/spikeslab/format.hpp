#pragma once

#include <string>

namespace spikeslab {

// Shortest round-trip decimal form, independent of the C locale.
// Non-finite values render as "nan", "inf", "-inf".
std::string format_double(double value);

}  // namespace spikeslab
