#pragma once

// Shared basics: error taxonomy, constants, finiteness checks, adaptive
// quadrature, and a deterministic parallel-for used by the scan drivers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace slogse {

inline constexpr double pi = 3.141592653589793238462643383279502884;

using cplx = std::complex<double>;

// Bad arguments, bad config files, malformed inputs.  CLI exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File-system level problems (missing file, short read).  CLI exit code 2.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite state detected during evolution.  CLI exit code 3.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw config_error(msg);
}

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Adaptive Simpson quadrature.  Used for the saturated-entropy integrand and
// as an independent oracle in the tests.
namespace detail {
inline double adapt(const std::function<double(double)>& f, double a, double fa,
                    double b, double fb, double fm, double whole, double tol,
                    int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12, int max_depth = 48) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adapt(f, a, fa, b, fb, fm, whole, tol, max_depth);
}

// Worker count: hardware concurrency capped by the SLOGSE_THREADS variable.
inline int worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    int n = hw == 0 ? 1 : static_cast<int>(hw);
    if (const char* env = std::getenv("SLOGSE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) n = std::min<long>(v, 256);
    }
    return std::max(1, n);
}

// Runs f(begin, end) over a partition of [0, n).  The partition depends on the
// worker count, so f must fold into accumulators whose merge is exactly
// associative and commutative (max, integer sums) for thread-count-independent
// results; all in-tree callers obey this.
template <class F>
inline void parallel_for(std::uint64_t n, F&& f, std::uint64_t min_chunk = 1024) {
    if (n == 0) return;
    int workers = worker_count();
    std::uint64_t chunk = (n + workers - 1) / static_cast<std::uint64_t>(workers);
    if (workers <= 1 || chunk < min_chunk) {
        f(std::uint64_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        std::uint64_t b = std::min<std::uint64_t>(n, chunk * static_cast<std::uint64_t>(w));
        std::uint64_t e = std::min<std::uint64_t>(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&f, b, e] { f(b, e); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace slogse
