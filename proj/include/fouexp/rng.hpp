#pragma once

#include <cstdint>
#include <random>

namespace fouexp {

/// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of replication `index` under master seed `seed`.
///
/// Splitting rule: splitmix64(splitmix64(seed) ^ splitmix64(index + 1)). Streams
/// for distinct (seed, index) pairs are decorrelated by the mixing function, and
/// the mapping does not depend on how replications are scheduled across threads.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 1));
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t index = 0) {
    return Engine(stream_seed(seed, index));
}

}  // namespace fouexp
