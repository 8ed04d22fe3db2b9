#pragma once

#include <cstdint>
#include <random>

namespace mbp {

using RandomStream = std::mt19937_64;

// Named substreams so channel draws and traffic draws never share state.
enum class StreamTag : std::uint64_t {
  kChannel = 1,
  kArrivals = 2,
  kPlacement = 3,
  kRotation = 4,
};

// SplitMix64 finalizer. Used as the counter-based seed derivation:
// derive_seed(parent, i) is a pure function and distinct i give
// statistically independent children.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t counter);

inline std::uint64_t derive_seed(std::uint64_t parent, StreamTag tag) {
  return derive_seed(parent, static_cast<std::uint64_t>(tag));
}

// Seed of drop `drop_index` within a campaign.
inline std::uint64_t drop_seed(std::uint64_t master_seed, std::uint64_t drop_index) {
  return derive_seed(master_seed, 0x100000000ULL + drop_index);
}

inline RandomStream make_stream(std::uint64_t seed) { return RandomStream(seed); }

}  // namespace mbp
