#pragma once

// Iterative radix-2 complex FFT.  Forward transform is unnormalized; the
// inverse carries 1/n, so a d-dimensional round trip carries 1/n^d overall.
// Twiddles come from a per-call table evaluated with sin/cos directly (no
// incremental recurrence), which keeps round-trip error near 1e-15.

#include <complex>
#include <cstddef>
#include <vector>

#include "core.hpp"

namespace slogse {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void fft_inplace(cplx* a, std::size_t n, bool inverse) {
    require(is_pow2(n), "fft: length must be a power of two");
    if (n == 1) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j |= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cplx> w(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        double ang = sign * 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
        w[k] = cplx(std::cos(ang), std::sin(ang));
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx t = a[i + k + len / 2] * w[k * stride];
                a[i + k + len / 2] = a[i + k] - t;
                a[i + k] += t;
            }
        }
    }

    if (inverse) {
        double s = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) a[i] *= s;
    }
}

inline void fft_inplace(std::vector<cplx>& a, bool inverse) {
    fft_inplace(a.data(), a.size(), inverse);
}

}  // namespace slogse
