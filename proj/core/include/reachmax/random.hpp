#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>

namespace reachmax {

/// SplitMix64 finalizer; maps (seed, stream) pairs to well-spread engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Engine for an independent sub-stream of `seed`.
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream)
{
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

// The standard distributions are implementation-defined; these are not, so
// seeded outputs match across standard libraries.

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform in [0, bound), bound > 0, by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound)
{
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

}  // namespace reachmax
