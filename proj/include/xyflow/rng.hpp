#pragma once

#include <cstdint>
#include <random>

namespace xyflow {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of stream `stream` derived from a master seed. Streams are
/// splitmix64(master XOR splitmix64(stream)), so distinct (master, stream)
/// pairs give decorrelated mt19937_64 states.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return splitmix64(master ^ splitmix64(stream));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t stream = 0) {
    return Rng(derive_seed(master, stream));
}

/// Uniform double in [0, 1) from the top 53 bits. Used instead of
/// std::uniform_real_distribution so that proposal streams are reproducible
/// independently of the standard library implementation.
inline double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace xyflow
