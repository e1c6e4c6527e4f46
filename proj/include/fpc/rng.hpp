#pragma once

#include <cmath>
#include <cstdint>

namespace fpc {

// Counter-based random streams: every draw is a pure function of
// (seed, stream, step, draw). Results do not depend on evaluation order,
// which keeps particle simulations reproducible under any loop structure.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_mix(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t step, std::uint64_t draw) {
    std::uint64_t h = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ (step * 0x9e3779b97f4a7c15ULL));
    h = splitmix64(h ^ (draw * 0xc2b2ae3d27d4eb4fULL));
    return h;
}

/// Uniform on (0, 1), never exactly 0 or 1.
inline double counter_u01(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t step, std::uint64_t draw) {
    const std::uint64_t bits = counter_mix(seed, stream, step, draw);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two counter draws.
inline double counter_normal(std::uint64_t seed, std::uint64_t stream,
                             std::uint64_t step, std::uint64_t draw) {
    const double u1 = counter_u01(seed, stream, step, 2 * draw);
    const double u2 = counter_u01(seed, stream, step, 2 * draw + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Unit-rate exponential draw (hard-killing clocks).
inline double counter_exponential(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t step, std::uint64_t draw) {
    return -std::log(counter_u01(seed, stream, step, draw));
}

} // namespace fpc
