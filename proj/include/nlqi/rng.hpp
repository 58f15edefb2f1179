#pragma once

// Splittable counter-based random stream: every draw is a pure function of
// (seed, index), so trial batches can run in any order and still merge
// deterministically.

#include <cmath>
#include <cstdint>

namespace nlqi {

namespace detail {
inline std::uint64_t splitmix_finalize(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}
}  // namespace detail

inline std::uint64_t stream_u64(std::uint64_t seed, std::uint64_t index) {
    return detail::splitmix_finalize(seed + (index + 1) * 0x9E3779B97F4A7C15ull);
}

// Uniform in [0, 1) with 53-bit resolution.
inline double stream_unit(std::uint64_t seed, std::uint64_t index) {
    return static_cast<double>(stream_u64(seed, index) >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two stream draws.
inline double stream_gaussian(std::uint64_t seed, std::uint64_t index) {
    const double u1 = stream_unit(seed, 2 * index);
    const double u2 = stream_unit(seed, 2 * index + 1);
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * M_PI * u2);
}

}  // namespace nlqi
