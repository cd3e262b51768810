#include "spikeslab/rng.hpp"

namespace spikeslab::sim {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = mix64(seed);
  for (std::uint64_t step : path) state = mix64(state ^ mix64(step));
  return state;
}

Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Engine(substream_seed(seed, path));
}

}  // namespace spikeslab::sim
