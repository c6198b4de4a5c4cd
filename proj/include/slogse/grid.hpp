#pragma once

// Periodic box [-ell/2, ell/2)^d sampled on n points per axis (row-major),
// complex fields on it, spectral calculus, physical-space norms, the
// smooth-cutoff localized L2 seminorm, and the CFLD1 binary field format.

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "core.hpp"
#include "fft.hpp"

namespace slogse {

struct grid {
    int d = 1;           // spatial dimension, 1..3
    int n = 8;           // points per axis, power of two >= 8
    double ell = 1.0;    // box side length
    double dx = 0.125;   // ell / n
    std::size_t npts = 8;                // n^d
    std::vector<double> coords;          // per-axis physical points, x_i = -ell/2 + i dx
    std::vector<double> wavenumbers;     // per-axis spectral multipliers, transform bin order

    double cell_volume() const {
        double v = dx;
        for (int a = 1; a < d; ++a) v *= dx;
        return v;
    }
    bool same_as(const grid& o) const { return d == o.d && n == o.n && ell == o.ell; }
};

inline grid make_grid(int d, int n, double ell) {
    require(d >= 1 && d <= 3, "grid: d must be 1, 2 or 3");
    require(n >= 8 && is_pow2(static_cast<std::size_t>(n)), "grid: n must be a power of two >= 8");
    require(ell > 0.0 && finite(ell), "grid: ell must be positive and finite");
    grid g;
    g.d = d;
    g.n = n;
    g.ell = ell;
    g.dx = ell / static_cast<double>(n);
    g.npts = 1;
    for (int a = 0; a < d; ++a) g.npts *= static_cast<std::size_t>(n);
    g.coords.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g.coords[static_cast<std::size_t>(i)] = -0.5 * ell + g.dx * static_cast<double>(i);
    g.wavenumbers.resize(static_cast<std::size_t>(n));
    double base = 2.0 * pi / ell;
    for (int i = 0; i < n; ++i) {
        int f = i < n / 2 ? i : i - n;  // 0..n/2-1, then -n/2..-1
        g.wavenumbers[static_cast<std::size_t>(i)] = base * static_cast<double>(f);
    }
    return g;
}

struct field {
    grid g;
    std::vector<cplx> v;

    field() = default;
    explicit field(const grid& gg) : g(gg), v(gg.npts, cplx(0.0, 0.0)) {}

    std::size_t size() const { return v.size(); }
    cplx& operator[](std::size_t i) { return v[i]; }
    const cplx& operator[](std::size_t i) const { return v[i]; }
};

// Decodes a row-major flat index into per-axis indices i0..i{d-1}.
inline std::array<int, 3> unravel(std::size_t idx, int d, int n) {
    std::array<int, 3> out = {0, 0, 0};
    for (int a = d - 1; a >= 0; --a) {
        out[static_cast<std::size_t>(a)] = static_cast<int>(idx % static_cast<std::size_t>(n));
        idx /= static_cast<std::size_t>(n);
    }
    return out;
}

// Physical coordinate of grid point `idx` along axis `a`.
inline double coord_at(const grid& g, std::size_t idx, int a) {
    auto id = unravel(idx, g.d, g.n);
    return g.coords[static_cast<std::size_t>(id[static_cast<std::size_t>(a)])];
}

// In-place d-dimensional transform: the 1-d transform applied along each axis.
inline void fft_field(field& u, bool inverse) {
    const int d = u.g.d;
    const std::size_t n = static_cast<std::size_t>(u.g.n);
    if (d == 1) {
        fft_inplace(u.v, inverse);
        return;
    }
    std::vector<cplx> line(n);
    const std::size_t total = u.g.npts;
    for (int a = 0; a < d; ++a) {
        // Axis a has stride n^{d-1-a}; lines are enumerated by the remaining indices.
        std::size_t stride = 1;
        for (int b = a + 1; b < d; ++b) stride *= n;
        std::size_t nlines = total / n;
        for (std::size_t l = 0; l < nlines; ++l) {
            // Decompose the line id into the block above the axis and the offset below it.
            std::size_t hi = l / stride, lo = l % stride;
            std::size_t base = hi * stride * n + lo;
            for (std::size_t i = 0; i < n; ++i) line[i] = u.v[base + i * stride];
            fft_inplace(line, inverse);
            for (std::size_t i = 0; i < n; ++i) u.v[base + i * stride] = line[i];
        }
    }
}

// Spectral multiplier table for the free flow over time t: e^{-i t |k|^2}
// per transform bin.  Multiply the forward transform by this, then invert.
inline std::vector<cplx> free_multiplier(const grid& g, double t) {
    std::vector<cplx> m(g.npts);
    for (std::size_t idx = 0; idx < g.npts; ++idx) {
        auto id = unravel(idx, g.d, g.n);
        double k2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            double k = g.wavenumbers[static_cast<std::size_t>(id[static_cast<std::size_t>(a)])];
            k2 += k * k;
        }
        m[idx] = std::polar(1.0, -t * k2);
    }
    return m;
}

inline void apply_spectral_multiplier(field& u, const std::vector<cplx>& m) {
    require(m.size() == u.size(), "spectral multiplier: size mismatch");
    fft_field(u, false);
    for (std::size_t i = 0; i < u.size(); ++i) u.v[i] *= m[i];
    fft_field(u, true);
}

// Free Schrödinger flow S_t = e^{i t Laplacian}.
inline field free_propagator(const field& u, double t) {
    require(finite(t), "free_propagator: t must be finite");
    field out = u;
    apply_spectral_multiplier(out, free_multiplier(u.g, t));
    return out;
}

// Spectral partial derivative along one axis.
inline field gradient_axis(const field& u, int axis) {
    require(axis >= 0 && axis < u.g.d, "gradient_axis: axis out of range");
    field out = u;
    fft_field(out, false);
    const grid& g = u.g;
    for (std::size_t idx = 0; idx < g.npts; ++idx) {
        auto id = unravel(idx, g.d, g.n);
        double k = g.wavenumbers[static_cast<std::size_t>(id[static_cast<std::size_t>(axis)])];
        out.v[idx] *= cplx(0.0, k);
    }
    fft_field(out, true);
    return out;
}

// Physical-space norms, cell-volume weighted.
inline double l2_norm(const field& u) {
    double s = 0.0;
    for (const auto& z : u.v) s += std::norm(z);
    return std::sqrt(s * u.g.cell_volume());
}

inline double lp_norm(const field& u, double p) {
    require(p >= 1.0, "lp_norm: p must be >= 1");
    double s = 0.0;
    for (const auto& z : u.v) s += std::pow(std::abs(z), p);
    return std::pow(s * u.g.cell_volume(), 1.0 / p);
}

inline double sup_norm(const field& u) {
    double m = 0.0;
    for (const auto& z : u.v) m = std::max(m, std::abs(z));
    return m;
}

// Re <u, w> = Re ∫ u conj(w) dx.
inline double inner_product_real(const field& u, const field& w) {
    require(u.g.same_as(w.g), "inner_product_real: grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += u.v[i].real() * w.v[i].real() + u.v[i].imag() * w.v[i].imag();
    return s * u.g.cell_volume();
}

inline double h1_norm(const field& u) {
    double s = 0.0;
    for (const auto& z : u.v) s += std::norm(z);
    field hat = u;
    fft_field(hat, false);
    const grid& g = u.g;
    double gs = 0.0;
    for (std::size_t idx = 0; idx < g.npts; ++idx) {
        auto id = unravel(idx, g.d, g.n);
        double k2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            double k = g.wavenumbers[static_cast<std::size_t>(id[static_cast<std::size_t>(a)])];
            k2 += k * k;
        }
        gs += k2 * std::norm(hat.v[idx]);
    }
    // Plancherel for the unnormalized transform: sum |hat|^2 = n^d sum |u|^2.
    gs /= static_cast<double>(g.npts);
    return std::sqrt((s + gs) * g.cell_volume());
}

// Quintic-smoothstep cutoff: zeta(s) = 1 for s <= 1, 0 for s >= 2,
// and 1 - q(s-1) with q(t) = t^3 (10 - 15 t + 6 t^2) in between (C^2).
inline double cutoff_zeta(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    double t = s - 1.0;
    return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// || zeta(|x|/R) u ||_{L^2}.  The cutoff must vanish before the boundary.
inline double localized_l2(const field& u, double R) {
    const grid& g = u.g;
    require(R > 0.0 && finite(R), "localized_l2: R must be positive");
    require(2.0 * R <= 0.5 * g.ell, "localized_l2: need 2R <= ell/2 so the cutoff fits the box");
    double s = 0.0;
    for (std::size_t idx = 0; idx < g.npts; ++idx) {
        auto id = unravel(idx, g.d, g.n);
        double r2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            double x = g.coords[static_cast<std::size_t>(id[static_cast<std::size_t>(a)])];
            r2 += x * x;
        }
        double z = cutoff_zeta(std::sqrt(r2) / R);
        s += z * z * std::norm(u.v[idx]);
    }
    return std::sqrt(s * g.cell_volume());
}

inline bool field_finite(const field& u) {
    for (const auto& z : u.v)
        if (!finite(z)) return false;
    return true;
}

// --- CFLD1 binary format -------------------------------------------------
// Layout: magic "CFLD0001", u32 d, u32 n, f64 ell, then n^d (re, im) f64
// pairs in row-major order.  All integers and floats little-endian.

static_assert(std::endian::native == std::endian::little,
              "CFLD1 I/O assumes a little-endian host");

inline void write_field(const field& u, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw io_error("cannot open for writing: " + path);
    const char magic[8] = {'C', 'F', 'L', 'D', '0', '0', '0', '1'};
    std::uint32_t d32 = static_cast<std::uint32_t>(u.g.d);
    std::uint32_t n32 = static_cast<std::uint32_t>(u.g.n);
    double ell = u.g.ell;
    bool ok = std::fwrite(magic, 1, 8, f) == 8 &&
              std::fwrite(&d32, 4, 1, f) == 1 &&
              std::fwrite(&n32, 4, 1, f) == 1 &&
              std::fwrite(&ell, 8, 1, f) == 1;
    if (ok) {
        for (const auto& z : u.v) {
            double re = z.real(), im = z.imag();
            if (std::fwrite(&re, 8, 1, f) != 1 || std::fwrite(&im, 8, 1, f) != 1) {
                ok = false;
                break;
            }
        }
    }
    std::fclose(f);
    if (!ok) throw io_error("short write: " + path);
}

inline field read_field(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw io_error("cannot open for reading: " + path);
    char magic[8];
    std::uint32_t d32 = 0, n32 = 0;
    double ell = 0.0;
    bool ok = std::fread(magic, 1, 8, f) == 8 &&
              std::fread(&d32, 4, 1, f) == 1 &&
              std::fread(&n32, 4, 1, f) == 1 &&
              std::fread(&ell, 8, 1, f) == 1;
    if (!ok || std::memcmp(magic, "CFLD0001", 8) != 0) {
        std::fclose(f);
        throw io_error("not a CFLD1 file: " + path);
    }
    grid g;
    try {
        g = make_grid(static_cast<int>(d32), static_cast<int>(n32), ell);
    } catch (const config_error& e) {
        std::fclose(f);
        throw io_error("invalid CFLD1 header in " + path + ": " + e.what());
    }
    field u(g);
    for (auto& z : u.v) {
        double re, im;
        if (std::fread(&re, 8, 1, f) != 1 || std::fread(&im, 8, 1, f) != 1) {
            std::fclose(f);
            throw io_error("truncated CFLD1 payload: " + path);
        }
        z = cplx(re, im);
    }
    // Exactly the declared payload, nothing more.
    char extra;
    bool trailing = std::fread(&extra, 1, 1, f) == 1;
    std::fclose(f);
    if (trailing) throw io_error("trailing bytes after CFLD1 payload: " + path);
    return u;
}

}  // namespace slogse
