#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hopdet {

// All randomness in the library flows through mt19937_64 plus the explicit
// variate transforms below. The std distributions are avoided on purpose:
// their output is implementation-defined, and identical seeds must give
// identical experiments on every toolchain.

/// Uniform draw in [0, 1) using the top 53 bits of the engine output.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Standard normal draw (Box-Muller). Consumes exactly two engine outputs.
inline double standard_normal(std::mt19937_64& eng) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    double u1 = 1.0 - uniform01(eng);  // (0, 1], keeps the log finite
    double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

/// Seed splitting rule: independent task i of a run rooted at `root` uses
/// root + i (mod 2^64). Documented so experiments can be reproduced piecewise.
inline std::uint64_t split_seed(std::uint64_t root, std::uint64_t task_index) {
    return root + task_index;
}

}  // namespace hopdet
