#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "slogse/fft.hpp"
#include "slogse/rng.hpp"

using namespace slogse;

namespace {
// O(n^2) reference DFT, the independent oracle for the fast transform.
std::vector<cplx> dft_direct(const std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    std::vector<cplx> out(n, cplx(0, 0));
    double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            double ang = sign * 2.0 * pi * static_cast<double>(k * j % n) / static_cast<double>(n);
            out[k] += a[j] * cplx(std::cos(ang), std::sin(ang));
        }
    if (inverse)
        for (auto& z : out) z /= static_cast<double>(n);
    return out;
}

std::vector<cplx> random_vec(std::size_t n, std::uint64_t seed) {
    rng g(seed);
    std::vector<cplx> a(n);
    for (auto& z : a) z = cplx(g.uniform(-1, 1), g.uniform(-1, 1));
    return a;
}
}  // namespace

TEST_CASE("fft matches the direct DFT oracle") {
    for (std::size_t n : {8u, 16u, 64u}) {
        auto a = random_vec(n, 100 + n);
        auto fast = a;
        fft_inplace(fast, false);
        auto slow = dft_direct(a, false);
        for (std::size_t i = 0; i < n; ++i)
            REQUIRE(std::abs(fast[i] - slow[i]) < 1e-11 * static_cast<double>(n));
        auto fastinv = a;
        fft_inplace(fastinv, true);
        auto slowinv = dft_direct(a, true);
        for (std::size_t i = 0; i < n; ++i)
            REQUIRE(std::abs(fastinv[i] - slowinv[i]) < 1e-12 * static_cast<double>(n));
    }
}

TEST_CASE("fft round trip is the identity") {
    for (std::size_t n : {8u, 256u, 4096u}) {
        auto a = random_vec(n, n);
        auto b = a;
        fft_inplace(b, false);
        fft_inplace(b, true);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
        CHECK(worst < 1e-13);
    }
}

TEST_CASE("Plancherel identity for the unnormalized forward transform") {
    auto a = random_vec(1024, 9);
    double phys = 0.0;
    for (auto& z : a) phys += std::norm(z);
    auto hat = a;
    fft_inplace(hat, false);
    double spec = 0.0;
    for (auto& z : hat) spec += std::norm(z);
    CHECK(std::abs(spec / static_cast<double>(a.size()) - phys) < 1e-12 * phys);
}

TEST_CASE("delta impulse transforms to a flat spectrum") {
    std::vector<cplx> a(32, cplx(0, 0));
    a[0] = cplx(1, 0);
    fft_inplace(a, false);
    for (auto& z : a) REQUIRE(std::abs(z - cplx(1, 0)) < 1e-14);
}

TEST_CASE("fft rejects non-power-of-two lengths") {
    std::vector<cplx> a(12, cplx(0, 0));
    CHECK_THROWS_AS(fft_inplace(a, false), config_error);
}
