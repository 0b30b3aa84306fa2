#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace xtalkprint {

// Deterministic, platform-independent randomness. All randomness in the
// pipeline flows from one master seed through derive_seed() paths, so
// parallel and serial execution see identical streams.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t seed_part(std::uint64_t v) { return v; }
inline std::uint64_t seed_part(int v) { return static_cast<std::uint64_t>(v); }
inline std::uint64_t seed_part(std::string_view s) { return fnv1a64(s); }

template <typename... Parts>
std::uint64_t derive_seed(std::uint64_t master, Parts&&... parts) {
    std::uint64_t h = splitmix64(master);
    ((h = splitmix64(h ^ seed_part(parts))), ...);
    return h;
}

// xoshiro256++ (Blackman & Vigna), seeded via splitmix64.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) {
            x = splitmix64(x);
            w = x;
        }
    }

    std::uint64_t next() {
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

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (two draws per call, no cached spare).
    double normal01() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Lognormal multiplier with unit mean: exp(sigma Z - sigma^2/2).
    double lognormal_unit_mean(double sigma) {
        if (sigma == 0.0) return 1.0;
        return std::exp(sigma * normal01() - 0.5 * sigma * sigma);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Random sign, +1 or -1.
    double sign() { return (next() & 1) ? 1.0 : -1.0; }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform01() * static_cast<double>(n)); }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

}  // namespace xtalkprint
