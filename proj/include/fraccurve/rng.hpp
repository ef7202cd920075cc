#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fraccurve {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key for a substream: hashes a seed together with a path of counters
/// (cell, replication, projection, ...). Results depend only on the path,
/// never on the thread that consumes the stream.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t p : path) h = mix64(h ^ mix64(p + 0x3c6ef372fe94f82bULL));
    return h;
}

inline Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Rng(stream_key(seed, path));
}

/// Draws a fresh 64-bit seed from an engine (used to hand a caller's rng to
/// routines that derive their own substreams).
inline std::uint64_t draw_seed(Rng& rng) { return rng(); }

}  // namespace fraccurve
