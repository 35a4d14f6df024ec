#pragma once

#include <cstdint>
#include <cmath>

namespace esoccp {

// Counter-based generator: every draw is a pure function of the key chain,
// so scenario i of stage j reproduces regardless of thread schedule.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t key, std::uint64_t word) {
    return splitmix64(key ^ (0x9e3779b97f4a7c15ULL + word));
}

template <typename... Words>
inline std::uint64_t mix(std::uint64_t key, std::uint64_t word, Words... rest) {
    return mix(mix(key, word), rest...);
}

/// Uniform draw in (0,1) from the high 53 bits.
inline double uniform01(std::uint64_t key) {
    const std::uint64_t bits = splitmix64(key) >> 11;
    double u = static_cast<double>(bits) * 0x1.0p-53;
    if (u <= 0.0) u = 0x1.0p-53;
    if (u >= 1.0) u = 1.0 - 0x1.0p-53;
    return u;
}

/// Inverse standard normal CDF (Acklam's rational approximation plus one
/// Halley refinement; absolute error below 1e-14 on (0,1)).
double norm_inv(double p);

/// Standard normal CDF.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Standard normal density.
inline double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline double normal(std::uint64_t key, double mean = 0.0, double sd = 1.0) {
    return mean + sd * norm_inv(uniform01(key));
}

} // namespace rng
} // namespace esoccp
