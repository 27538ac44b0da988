#pragma once

#include <cstdint>
#include <random>

namespace kolmac {

// Unbiased draw in [0, n) via rejection sampling. std::uniform_int_distribution
// is implementation-defined, so seeded runs would not be portable with it.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t r = gen();
        if (r >= threshold) return r % n;
    }
}

inline int uniform_int(std::mt19937_64& gen, int lo, int hi) {
    return lo + static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(hi - lo) + 1));
}

}  // namespace kolmac
