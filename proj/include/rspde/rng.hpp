#pragma once

#include <cstdint>
#include <random>

namespace rspde {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `stream` of a family rooted at `base`.
///
/// Streams are identified by (replicate, channel) pairs throughout the
/// library: stream_seed(seed, replicate, channel). Two distinct index pairs
/// give unrelated 64-bit seeds for std::mt19937_64.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t replicate,
                          std::uint64_t channel = 0);

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t base, std::uint64_t replicate,
                          std::uint64_t channel = 0) {
  return Engine(stream_seed(base, replicate, channel));
}

/// Standard normal via Marsaglia polar method. Implemented here rather than
/// with std::normal_distribution so draws are identical across standard
/// libraries.
double standard_normal(Engine& engine);

/// Uniform on [0,1) with 53 random bits.
double uniform01(Engine& engine);

}  // namespace rspde
