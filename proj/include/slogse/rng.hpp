#pragma once

// Counter-based deterministic RNG.
//
// out_i = mix64(key + (i+1)*golden), key = mix64(seed + (stream+1)*golden),
// where mix64 is the SplitMix64 finalizer.  Output depends only on
// (seed, stream, counter), never on global state or platform, so any sample
// index can be generated independently — scans shard across threads with
// bit-identical results for every thread count.

#include <cmath>
#include <cstdint>
#include <vector>

#include "core.hpp"

namespace slogse {

inline constexpr std::uint64_t rng_golden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

class rng {
  public:
    explicit rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix64(seed + (stream + 1) * rng_golden)) {}

    std::uint64_t next_u64() { return mix64(key_ + (++ctr_) * rng_golden); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double log_uniform(double a, double b) {
        return std::exp(uniform(std::log(a), std::log(b)));
    }

    // Standard normal (Box–Muller, cached spare).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        double t = 2.0 * pi * uniform01();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Poisson count by Knuth's product method; recursive halving keeps the
    // partial products away from underflow for large means.
    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        if (mean > 32.0) {
            double half = 0.5 * mean;
            return poisson(half) + poisson(mean - half);
        }
        double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > limit);
        return k - 1;
    }

    // Uniform direction on the unit sphere of R^m (for m = 1: a sign).
    std::vector<double> sphere(int m) {
        std::vector<double> v(static_cast<std::size_t>(m));
        if (m == 1) {
            v[0] = (next_u64() & 1ull) ? 1.0 : -1.0;
            return v;
        }
        for (;;) {
            double s2 = 0.0;
            for (auto& x : v) {
                x = normal();
                s2 += x * x;
            }
            if (s2 > 0.0) {
                double inv = 1.0 / std::sqrt(s2);
                for (auto& x : v) x *= inv;
                return v;
            }
        }
    }

    // Uniform point in the closed unit ball of R^m (radius law U^{1/m}).
    std::vector<double> ball(int m) {
        auto v = sphere(m);
        double r = std::pow(uniform_pos(), 1.0 / static_cast<double>(m));
        for (auto& x : v) x *= r;
        return v;
    }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace slogse
