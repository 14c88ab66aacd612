#pragma once

#include <cstdint>
#include <random>

namespace seqsgpv {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for replicate `replicate` of effect `effect_index`. A pure function of
/// its arguments, so results never depend on which worker ran the replicate.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t effect_index,
                                    std::uint64_t replicate) noexcept {
    std::uint64_t s = mix64(master_seed);
    s = mix64(s ^ (effect_index * 0xd1b54a32d192ed03ULL));
    s = mix64(s ^ (replicate * 0x8cb92ba72f3d8dd7ULL));
    return s;
}

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t effect_index,
                       std::uint64_t replicate) {
    return Rng(stream_seed(master_seed, effect_index, replicate));
}

}  // namespace seqsgpv
