#pragma once

#include <cstdint>

namespace newton {

/// Counter-keyed mixer; every draw is a pure function of (key, counter), so
/// sampled certificates replay bit-identically regardless of thread count.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Uniform double in [0,1).
inline double uniform01(std::uint64_t key, std::uint64_t counter) {
    return static_cast<double>(splitmix64(key ^ splitmix64(counter)) >> 11) *
           0x1.0p-53;
}

/// Uniform double in [lo,hi).
inline double uniform_in(std::uint64_t key, std::uint64_t counter, double lo,
                         double hi) {
    return lo + (hi - lo) * uniform01(key, counter);
}

}  // namespace newton
