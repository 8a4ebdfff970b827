#pragma once

#include <cstdint>
#include <random>

namespace seloqr {

/// One splitmix64 step: advances the state and returns a mixed word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent engine for one replication. The (seed, rep) pair is avalanche
/// mixed, so any replication regenerates without running the others and
/// nearby pairs do not produce correlated streams.
inline std::mt19937_64 replication_stream(std::uint64_t seed, std::uint64_t rep) {
    std::uint64_t state = seed + (rep + 1) * 0x9e3779b97f4a7c15ULL;
    const std::uint64_t a = splitmix64(state);
    const std::uint64_t b = splitmix64(state);
    return std::mt19937_64(a ^ (b << 32 | b >> 32));
}

/// Uniform draw strictly inside (0,1): top 53 bits offset by half a step, so
/// inverse-CDF sampling never sees an endpoint.
inline double u01(std::mt19937_64& g) {
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace seloqr
