#ifndef NBHD_RANDOM_HPP
#define NBHD_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace nbhd {

/**
 * Seeded generator with platform-independent draws.
 *
 * `std::mt19937_64` output is fully specified by the standard, but the
 * `std::*_distribution` adaptors are not, so all conversions to uniform and
 * normal variates are done here. Identical seeds give bit-identical streams on
 * every conforming toolchain.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /** Uniform on [0, 1) with 53 random bits. */
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /** Uniform integer on [0, n). */
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection keeps the draw unbiased.
        const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /** Standard normal via Box-Muller; caches the second variate. */
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace nbhd

#endif
