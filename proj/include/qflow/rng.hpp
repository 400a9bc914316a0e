#pragma once

#include <cstdint>
#include <cmath>

#include "qflow/linalg.hpp"

namespace qflow {

// Counter-based generator: draw k is a pure function of (seed, stream, k),
// so sequences reproduce exactly across runs and split() yields streams that
// can be consumed in any order without affecting each other.
class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0)
        : seed_(seed),
          stream_(stream),
          key_(mix(mix(seed + 0x9E3779B97F4A7C15ULL) ^ mix(stream ^ 0xD1B54A32D192ED03ULL))) {}

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

    uint64_t next_u64() { return mix(key_ + 0x9E3779B97F4A7C15ULL * ++ctr_); }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // (0, 1]
    double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; consumes exactly two uniforms per draw (no cached pair).
    double gaussian() {
        const double u1 = uniform_open();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    Rng split(uint64_t substream) const {
        Rng r = *this;
        r.key_ = mix(key_ ^ mix(substream + 0xBF58476D1CE4E5B9ULL));
        r.ctr_ = 0;
        return r;
    }

private:
    static uint64_t mix(uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    uint64_t seed_;
    uint64_t stream_;
    uint64_t key_;
    uint64_t ctr_ = 0;
};

}  // namespace qflow
