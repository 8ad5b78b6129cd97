#pragma once

#include <cmath>
#include <cstdint>

// Counter-free splittable RNG used everywhere randomness is needed.
// All sampling routines are hand-rolled on top of the raw 64-bit stream so
// results are bit-identical across platforms and standard libraries.

namespace router {

// SplitMix64 (Steele, Lea, Flood 2014).
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe under log().
    double next_double_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Box-Muller standard normal.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_double_open();
        const double u2 = next_double();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return mag * std::cos(2.0 * M_PI * u2);
    }

    // Knuth inversion, chunked so the loop count stays bounded in the mean.
    uint64_t next_poisson(double mean) {
        uint64_t total = 0;
        while (mean > 0.0) {
            const double chunk = mean > 32.0 ? 32.0 : mean;
            mean -= chunk;
            const double limit = std::exp(-chunk);
            double prod = next_double_open();
            uint64_t k = 0;
            while (prod > limit) {
                ++k;
                prod *= next_double_open();
            }
            total += k;
        }
        return total;
    }

  private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Child seed for stream `index` of `master`; splitting this way makes
// parallel and serial realization loops agree.
inline uint64_t child_seed(uint64_t master, uint64_t index) {
    SplitMix64 mix(master ^ (0xA0761D6478BD642FULL * (index + 1)));
    mix.next_u64();
    return mix.next_u64();
}

}  // namespace router
