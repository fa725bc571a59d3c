#pragma once

#include <cstdint>
#include <utility>

#include "latticemc/trig.hpp"

// Deterministic random streams. Every trajectory owns a xoshiro256** engine
// seeded from (master_seed, atom_index) through splitmix64, so results do not
// depend on thread count or completion order. All variates are generated with
// fully specified arithmetic (no std::*_distribution, whose algorithms are
// implementation-defined).

namespace latticemc {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Xoshiro256 {
  public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform angle in [0, 2*pi).
    double angle() { return 6.283185307179586476925286766559 * uniform01(); }

    /// Pair of independent standard normals (Box-Muller; fixed draw count).
    std::pair<double, double> normal_pair() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double rad = std::sqrt(-2.0 * std::log(1.0 - u1));
        double sn, cn;
        fast_sincos(6.283185307179586476925286766559 * u2, sn, cn);
        return {rad * cn, rad * sn};
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Independent stream for one unit of work derived from a master seed.
inline Xoshiro256 derive_stream(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t sm = index;
    const std::uint64_t salted = master_seed ^ splitmix64(sm);
    return Xoshiro256(salted);
}

}  // namespace latticemc
