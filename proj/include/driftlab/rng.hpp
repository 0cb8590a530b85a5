#pragma once

#include <cstdint>
#include <random>

namespace driftlab {

/// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for substream `index` of purpose `stream` under a master seed.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream,
                                       std::uint64_t index) noexcept {
  return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(substream_seed(seed, stream, index));
}

// Stream tags. Values are arbitrary but frozen: changing one changes every
// generated dataset.
namespace streams {
inline constexpr std::uint64_t kExecution = 0x45584543ULL;  // per-t schedule + noise
inline constexpr std::uint64_t kSolverInit = 0x494e4954ULL;
inline constexpr std::uint64_t kRandomGuess = 0x52414e44ULL;
inline constexpr std::uint64_t kKMeans = 0x4b4d4e53ULL;
inline constexpr std::uint64_t kAutoencoder = 0x41454e43ULL;
}  // namespace streams

}  // namespace driftlab
