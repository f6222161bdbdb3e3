#pragma once

#include <cstdint>
#include <random>

namespace mcorr {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of the independent stream `index` derived from `base_seed`.
/// Replications, resamples and chains are each keyed by their own index so
/// results do not depend on the thread schedule.
constexpr std::uint64_t stream_seed(std::uint64_t base_seed, std::uint64_t index) {
    return mix64(mix64(base_seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t base_seed, std::uint64_t index) {
    return Rng(stream_seed(base_seed, index));
}

}  // namespace mcorr
