#pragma once

#include <cstdint>
#include <random>

namespace rvnav {

// All randomness flows through mt19937_64 with hand-rolled mappings, so the
// same seed reproduces the same stream on every platform (std distributions
// are implementation-defined).
using Rng = std::mt19937_64;

inline double uniform01(Rng& g) {
    return double(g() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

inline std::uint64_t uniform_index(Rng& g, std::uint64_t n) {
    return n == 0 ? 0 : g() % n;
}

}  // namespace rvnav
