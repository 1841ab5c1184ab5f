#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace flexdo {

// Draw helpers over std::mt19937_64 with a fixed mapping, so seeded output does
// not depend on the standard library's distribution implementations.

// Uniform in [0, 1).
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform in (0, 1].
inline double uniform01_open_low(std::mt19937_64& rng) {
    return 1.0 - uniform01(rng);
}

// Uniform integer in [lo, hi].
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return lo + static_cast<std::int64_t>(rng());
    // Rejection keeps the draw unbiased.
    const std::uint64_t limit = (~std::uint64_t{0} / span) * span;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo * std::exp(uniform01(rng) * std::log(hi / lo));
}

}  // namespace flexdo
