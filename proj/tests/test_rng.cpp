#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "slogse/rng.hpp"

using namespace slogse;

TEST_CASE("rng is a pure function of (seed, stream, counter)") {
    rng a(42), b(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
    rng c(42, 1);
    bool differs = false;
    rng a2(42);
    for (int i = 0; i < 16; ++i)
        if (a2.next_u64() != c.next_u64()) differs = true;
    CHECK(differs);
    rng d(43);
    rng a3(42);
    bool seed_differs = false;
    for (int i = 0; i < 16; ++i)
        if (a3.next_u64() != d.next_u64()) seed_differs = true;
    CHECK(seed_differs);
}

TEST_CASE("uniform01 lies in [0,1) and uniform_pos in (0,1]") {
    rng g(7);
    double mn = 2.0, mx = -1.0, sum = 0.0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        double u = g.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        mn = std::min(mn, u);
        mx = std::max(mx, u);
        sum += u;
    }
    CHECK(sum / N == Catch::Approx(0.5).margin(5e-3));
    CHECK(mn < 0.01);
    CHECK(mx > 0.99);
    rng h(7);
    for (int i = 0; i < 100000; ++i) {
        double u = h.uniform_pos();
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
    }
}

TEST_CASE("normal moments") {
    rng g(11);
    const int N = 400000;
    double s = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < N; ++i) {
        double x = g.normal();
        s += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    CHECK(s / N == Catch::Approx(0.0).margin(6e-3));
    CHECK(s2 / N == Catch::Approx(1.0).margin(1.5e-2));
    CHECK(s4 / N == Catch::Approx(3.0).margin(1e-1));
}

TEST_CASE("poisson mean and variance, small and halved-large regimes") {
    for (double mean : {0.5, 4.0, 60.0}) {
        rng g(static_cast<std::uint64_t>(mean * 100) + 3);
        const int N = 100000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < N; ++i) {
            double k = static_cast<double>(g.poisson(mean));
            s += k;
            s2 += k * k;
        }
        double m = s / N, v = s2 / N - m * m;
        // 5-sigma bands for the fixed seeds above.
        CHECK(std::abs(m - mean) < 5.0 * std::sqrt(mean / N));
        CHECK(std::abs(v - mean) < 0.05 * mean + 0.05);
    }
    rng g(5);
    CHECK(g.poisson(0.0) == 0);
    CHECK(g.poisson(-1.0) == 0);
}

TEST_CASE("sphere and ball sampling") {
    rng g(13);
    for (int m : {1, 2, 3, 5}) {
        for (int i = 0; i < 1000; ++i) {
            auto v = g.sphere(m);
            REQUIRE(static_cast<int>(v.size()) == m);
            double r2 = 0.0;
            for (double x : v) r2 += x * x;
            REQUIRE(std::abs(r2 - 1.0) < 1e-12);
        }
        double maxr = 0.0;
        for (int i = 0; i < 2000; ++i) {
            auto v = g.ball(m);
            double r2 = 0.0;
            for (double x : v) r2 += x * x;
            REQUIRE(r2 > 0.0);
            REQUIRE(r2 <= 1.0 + 1e-15);
            maxr = std::max(maxr, std::sqrt(r2));
        }
        CHECK(maxr > 0.9);  // the radius law actually reaches the shell
    }
    // m = 1 spheres are signs
    rng h(17);
    int plus = 0;
    for (int i = 0; i < 1000; ++i) {
        auto v = h.sphere(1);
        REQUIRE((v[0] == 1.0 || v[0] == -1.0));
        if (v[0] > 0) ++plus;
    }
    CHECK(plus > 400);
    CHECK(plus < 600);
}
