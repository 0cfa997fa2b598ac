#pragma once

#include <cmath>
#include <cstdint>

namespace clup {

// SplitMix64 (Steele/Lea/Vigna). Counter-based 64-bit generator: the whole
// stream is a pure function of the seed, so instances are reproducible across
// platforms and trials can derive independent streams from (seed, index).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // standard normal via Marsaglia polar; explicit algorithm (not
    // std::normal_distribution) so streams are identical on every platform
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // +1 or -1 with equal probability
    double sign() { return (next() >> 63) ? 1.0 : -1.0; }

    // independent stream for a sub-task (trial index, restart index, ...)
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 g(seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1)));
        return g.next();
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace clup
