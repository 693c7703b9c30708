#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace wfp {

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, counter), so particle updates can run in any order, or in
// parallel, and still produce identical streams.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

// Uniform in the open interval (0, 1).
inline double u01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

inline double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return u01(key(seed, stream, counter));
}

// Box-Muller pair of independent standard normals.
inline std::pair<double, double> normal_pair(std::uint64_t seed, std::uint64_t stream,
                                             std::uint64_t counter) {
    const std::uint64_t k1 = key(seed, stream, counter);
    const std::uint64_t k2 = splitmix64(k1);
    const double u1 = u01(k1);
    const double u2 = u01(k2);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return normal_pair(seed, stream, counter).first;
}

}  // namespace rng
}  // namespace wfp
