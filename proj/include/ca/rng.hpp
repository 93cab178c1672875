#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Reproducibility substrate. All randomness in the toolkit flows through
// Stream, a thin wrapper over std::mt19937_64 whose raw output sequence is
// pinned by the C++ standard, so identical seeds give identical results on
// every conforming platform. The variate transforms below are part of the
// contract and must not change:
//
//   uniform01:  u = (x >> 11) * 2^-53 with x one raw 64-bit draw, u in [0,1)
//   gaussian:   Box-Muller, cosine branch only, no cached mate:
//               z = sqrt(-2 ln(1-u1)) * cos(2 pi u2)
//               consumes exactly two raw draws per variate
//   laplace:    inverse-CDF fold: x = b * sign(u) * ln(1 - 2|u|)
//               with u = uniform01() - 1/2 on [-1/2, 1/2); a draw landing
//               exactly on -1/2 is nudged by 2^-54 to keep the log finite
//
// Stream seeds are derived with splitmix64 folds (derive_seed) so that
// sub-streams of one master seed are statistically independent.

namespace ca {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Folds salts into a base seed, one splitmix64 round per salt.
template <typename... Salts>
std::uint64_t derive_seed(std::uint64_t base, Salts... salts) {
    std::uint64_t s = splitmix64(base);
    ((s = splitmix64(s ^ static_cast<std::uint64_t>(salts))), ...);
    return s;
}

class Stream {
public:
    explicit Stream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log1p(-u1)) *
               std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

    double laplace(double scale) {
        double u = uniform01() - 0.5;
        if (u == -0.5) u = -0.5 + 0x1.0p-54;
        const double sign = (u > 0.0) ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
        return scale * sign * std::log(1.0 - 2.0 * std::abs(u));
    }

    // Uniform integer in [0, bound) by rejection on the top range.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace ca
