#pragma once

#include <cstdint>
#include <random>

#include "otfs_sbl/linalg.hpp"

namespace otfs {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; bijective mixing of a 64-bit counter.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream for (seed, index, lane). Counter-based, so the stream
/// for a given trial never depends on how trials are scheduled.
inline Rng substream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0) {
    const std::uint64_t key = splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL) ^
                                         splitmix64(lane * 0xd1b54a32d192ed03ULL + 1));
    std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    return Rng(seq);
}

/// Circularly symmetric CN(0, variance): real and imaginary parts each N(0, variance/2).
inline cplx complex_normal(Rng& rng, double variance = 1.0) {
    if (variance <= 0.0) return {0.0, 0.0};
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

inline ComplexVector complex_normal_vector(Rng& rng, Eigen::Index n, double variance = 1.0) {
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = complex_normal(rng, variance);
    return v;
}

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace otfs
