#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace spikeslab::sim {

using Engine = std::mt19937_64;

// SplitMix64 output function.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent seed for the substream addressed by `path`, e.g.
// {experiment, sigma index, replicate, purpose}. Adding new paths never
// changes the seeds of existing ones.
std::uint64_t substream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

// Stream tags.
enum Stream : std::uint64_t {
  kGlsExperiment = 0x47'4c'53,   // "GLS"
  kPpcaExperiment = 0x50'43'41,  // "PCA"
  kWishartDraw = 1,
  kEffectDraw = 2,
  kNoiseDraw = 3,
  kClusterMeans = 4,
  kEntryNoise = 5,
};

}  // namespace spikeslab::sim
