#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Thin deterministic layer over mt19937_64. std::*_distribution is
// implementation-defined, so the draws used for sampling, SOFM training and
// scene synthesis are derived here instead; outputs are identical on every
// platform for a given seed.

namespace evfuzz {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Unbiased integer in [0, n), n >= 1 (rejection sampling).
    std::uint64_t uniform_below(std::uint64_t n) {
        const std::uint64_t limit = n == 0 ? 0 : UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller, caching the spare value.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace evfuzz
