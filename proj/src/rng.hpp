#pragma once

#include <cstdint>
#include <random>

namespace tracesynth {

// All randomness in the project flows through these helpers. std::mt19937_64 is
// fully specified by the standard, but the std distributions are not, so frozen
// regression values and cross-toolchain reproducibility require our own draws.
using Rng = std::mt19937_64;

inline std::uint64_t next_u64(Rng& rng) {
    return rng();
}

// Uniform integer in [0, n). Modulo bias is below 2^-32 for every n used here.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    return rng() % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [-scale, scale).
inline double uniform_symmetric(Rng& rng, double scale) {
    return (2.0 * uniform_real01(rng) - 1.0) * scale;
}

// splitmix64 finalizer; used to derive independent streams and stateless noise.
inline std::uint64_t mix_u64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace tracesynth
