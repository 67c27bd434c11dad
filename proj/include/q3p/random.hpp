#pragma once

#include <cstdint>
#include <random>

namespace q3p {

using Rng = std::mt19937_64;

// Purposes of independent random streams derived from one user seed.
enum class Stream : std::uint64_t {
  kShot = 1,
  kTrajectory = 2,
  kStaticNoise = 3,
  kOptimizer = 4,
  kCycle = 5,
  kLandscape = 6,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                                    std::uint64_t index) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream)) ^ index);
}

// Each (seed, stream, index) triple gets its own generator, so results do not
// depend on how work is split across threads.
inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  return Rng{derive_seed(seed, stream, index)};
}

}  // namespace q3p
