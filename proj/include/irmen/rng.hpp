#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

#include "irmen/vec3.hpp"

// Deterministic, stream-splittable RNG.
//
// Every consumer derives its own Rng from (seed, id, id, ...) so results never
// depend on thread scheduling or evaluation order: a cell in a grid, an MC
// iteration, or a sweep point each get an independent stream addressed by
// integers. Core generator is xoshiro256++, seeded through splitmix64; normal
// deviates come from a 128-layer ziggurat.
namespace irmen {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Order-sensitive fold of a list of ids into one 64-bit stream key.
inline std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t s = seed;
    std::uint64_t k = splitmix64(s);
    for (std::uint64_t id : ids) {
        s ^= id + 0x9e3779b97f4a7c15ull + (k << 6) + (k >> 2);
        k = splitmix64(s);
    }
    return k;
}

namespace detail {

struct ZigguratTables {
    std::array<std::uint32_t, 128> kn{};
    std::array<double, 128> wn{};
    std::array<double, 128> fn{};
};

// Marsaglia & Tsang constants for 128 rectangles.
inline const ZigguratTables& ziggurat_tables() {
    static const ZigguratTables t = [] {
        ZigguratTables z;
        const double m1 = 2147483648.0;
        double dn = 3.442619855899;
        double tn = dn;
        const double vn = 9.91256303526217e-3;
        double q = vn / std::exp(-0.5 * dn * dn);
        z.kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
        z.kn[1] = 0;
        z.wn[0] = q / m1;
        z.wn[127] = dn / m1;
        z.fn[0] = 1.0;
        z.fn[127] = std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; i--) {
            dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
            z.kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
            tn = dn;
            z.fn[i] = std::exp(-0.5 * dn * dn);
            z.wn[i] = dn / m1;
        }
        return z;
    }();
    return t;
}

}  // namespace detail

class Rng {
  public:
    explicit Rng(std::uint64_t key) {
        std::uint64_t s = key;
        for (auto& w : state_) w = splitmix64(s);
    }

    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> ids)
        : Rng(stream_key(seed, ids)) {}

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, bound). Lemire's method.
    std::uint32_t below(std::uint32_t bound) {
        std::uint64_t m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(next_u64())) * bound;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < bound) {
            const std::uint32_t thresh = (0u - bound) % bound;
            while (lo < thresh) {
                m = static_cast<std::uint64_t>(static_cast<std::uint32_t>(next_u64())) * bound;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    // Standard normal deviate, ziggurat method.
    double normal() {
        const auto& z = detail::ziggurat_tables();
        for (;;) {
            const auto hz = static_cast<std::int32_t>(next_u64() >> 32);
            const std::uint32_t iz = static_cast<std::uint32_t>(hz) & 127u;
            if (static_cast<std::uint32_t>(hz < 0 ? -hz : hz) < z.kn[iz]) {
                return hz * z.wn[iz];
            }
            const double r = 3.442619855899;
            if (iz == 0) {  // base strip: exact tail
                double xx, yy;
                do {
                    xx = -std::log(uniform_nonzero()) / r;
                    yy = -std::log(uniform_nonzero());
                } while (yy + yy < xx * xx);
                return hz > 0 ? r + xx : -r - xx;
            }
            const double x = hz * z.wn[iz];
            if (z.fn[iz] + uniform() * (z.fn[iz - 1] - z.fn[iz]) < std::exp(-0.5 * x * x)) {
                return x;
            }
            // else: resample
        }
    }

    Vec3 normal3() { return {normal(), normal(), normal()}; }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    double uniform_nonzero() {
        double u;
        do { u = uniform(); } while (u == 0.0);
        return u;
    }

    std::uint64_t state_[4];
};

}  // namespace irmen
