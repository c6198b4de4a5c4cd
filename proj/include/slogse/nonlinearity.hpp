#pragma once

// The regularized logarithm, the saturated channel families g~ with their
// derivatives and uniform bound constant, the pointwise phase flow of the
// splitting scheme, and the entropy / Orlicz / energy functionals.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "core.hpp"
#include "grid.hpp"

namespace slogse {

// Regularization parameter, constrained to (0, 1).
struct eps_param {
    double eps;
    explicit eps_param(double e) : eps(e) {
        require(e > 0.0 && e < 1.0, "eps must lie in (0, 1)");
    }
};

// L_eps(r) = log((r + eps) / (1 + eps r)) for moduli r >= 0.
// Bounded by |log eps|, Lipschitz with constant 1 + log(1/eps).
inline double l_eps(double r, const eps_param& e) {
    return std::log((r + e.eps) / (1.0 + e.eps * r));
}

// --- saturated channel families ------------------------------------------
// Channels act through g(y) = g~(|y|^2) y.  Families (theta = |y|^2):
//   photorefractive: g~ = theta / (1 + rho theta)
//   sqrt_gap:        g~ = 1 - (1 + theta)^{-1/2}
//   double_sat:      g~ = theta (2 + rho theta) / (1 + rho theta)^2
//   log_sat:         g~ = log(1 + rho theta) / (1 + log(1 + rho theta))
//   constant:        g~ = c
// All are bounded with bounded first/second derivatives against the weights
// (1 + theta), (1 + theta^{3/2}).

enum class channel_family { photorefractive, sqrt_gap, double_sat, log_sat, constant };

struct saturated_nonlinearity {
    channel_family family = channel_family::photorefractive;
    double rho = 1.0;   // saturation scale; families with rho require rho > 0
    double cval = 0.0;  // constant family value
};

inline channel_family family_from_string(const std::string& s) {
    if (s == "photorefractive") return channel_family::photorefractive;
    if (s == "sqrt_gap") return channel_family::sqrt_gap;
    if (s == "double_sat") return channel_family::double_sat;
    if (s == "log_sat") return channel_family::log_sat;
    if (s == "constant") return channel_family::constant;
    throw config_error("unknown channel family: " + s);
}

inline std::string family_to_string(channel_family f) {
    switch (f) {
        case channel_family::photorefractive: return "photorefractive";
        case channel_family::sqrt_gap: return "sqrt_gap";
        case channel_family::double_sat: return "double_sat";
        case channel_family::log_sat: return "log_sat";
        case channel_family::constant: return "constant";
    }
    return "?";
}

inline void validate_channel(const saturated_nonlinearity& s) {
    if (s.family == channel_family::constant) {
        require(finite(s.cval) && s.cval >= 0.0, "constant channel: cval must be finite and >= 0");
    } else {
        require(finite(s.rho) && s.rho > 0.0, "channel: rho must be positive");
    }
}

struct gtilde_val {
    double g, gp, gpp;  // value, first and second derivative in theta
};

inline gtilde_val gtilde_eval(const saturated_nonlinearity& s, double theta) {
    require(theta >= 0.0 && finite(theta), "gtilde: theta must be finite and >= 0");
    switch (s.family) {
        case channel_family::photorefractive: {
            double den = 1.0 + s.rho * theta;
            return {theta / den, 1.0 / (den * den), -2.0 * s.rho / (den * den * den)};
        }
        case channel_family::sqrt_gap: {
            double b = 1.0 + theta;
            double rb = std::sqrt(b);
            return {1.0 - 1.0 / rb, 0.5 / (b * rb), -0.75 / (b * b * rb)};
        }
        case channel_family::double_sat: {
            double den = 1.0 + s.rho * theta;
            double d2 = den * den;
            return {theta * (2.0 + s.rho * theta) / d2, 2.0 / (d2 * den),
                    -6.0 * s.rho / (d2 * d2)};
        }
        case channel_family::log_sat: {
            double b = 1.0 + s.rho * theta;
            double L = std::log1p(s.rho * theta);
            double e = 1.0 + L;
            return {L / e, s.rho / (b * e * e),
                    -s.rho * s.rho * (3.0 + L) / (b * b * e * e * e)};
        }
        case channel_family::constant:
            return {s.cval, 0.0, 0.0};
    }
    return {0.0, 0.0, 0.0};
}

// Value-only fast path for the solver's inner loops.
inline double gtilde(const saturated_nonlinearity& s, double theta) {
    switch (s.family) {
        case channel_family::photorefractive: return theta / (1.0 + s.rho * theta);
        case channel_family::sqrt_gap: return 1.0 - 1.0 / std::sqrt(1.0 + theta);
        case channel_family::double_sat: {
            double den = 1.0 + s.rho * theta;
            return theta * (2.0 + s.rho * theta) / (den * den);
        }
        case channel_family::log_sat: {
            double L = std::log1p(s.rho * theta);
            return L / (1.0 + L);
        }
        case channel_family::constant: return s.cval;
    }
    return 0.0;
}

struct noise_channel_set {
    std::vector<saturated_nonlinearity> channels;
    int m() const { return static_cast<int>(channels.size()); }
};

inline void validate_channels(const noise_channel_set& ch) {
    require(ch.m() >= 1, "channel set must be non-empty");
    for (const auto& c : ch.channels) validate_channel(c);
}

// Signed bound expression whose sup over theta defines the channel constant:
//   g~ + (1 + theta) g~' + (1 + theta^{3/2}) g~''.
inline double channel_bound_expr(const saturated_nonlinearity& s, double theta) {
    gtilde_val v = gtilde_eval(s, theta);
    return v.g + (1.0 + theta) * v.gp + (1.0 + std::pow(theta, 1.5)) * v.gpp;
}

// theta -> infinity limit of the bound expression.  For every family the
// derivative terms decay and the limit equals lim g~: photorefractive and
// double_sat saturate at 1/rho, sqrt_gap and log_sat at 1, constant at c.
inline double channel_bound_limit(const saturated_nonlinearity& s) {
    switch (s.family) {
        case channel_family::photorefractive: return 1.0 / s.rho;
        case channel_family::sqrt_gap: return 1.0;
        case channel_family::double_sat: return 1.0 / s.rho;
        case channel_family::log_sat: return 1.0;
        case channel_family::constant: return s.cval;
    }
    return 0.0;
}

// sup over channels and theta >= 0 of the bound expression: log-spaced grid
// scan on [1e-8, theta_max] plus theta = 0 plus the analytic tail limit.
inline double k_gtilde_estimate(const noise_channel_set& ch, double theta_max = 1e6,
                                int samples = 4096) {
    validate_channels(ch);
    require(samples >= 1000, "k_gtilde_estimate: need at least 1000 samples");
    require(theta_max > 1.0, "k_gtilde_estimate: theta_max must exceed 1");
    double sup = -1e300;
    for (const auto& c : ch.channels) {
        sup = std::max(sup, channel_bound_expr(c, 0.0));
        double lo = std::log(1e-8), hi = std::log(theta_max);
        for (int i = 0; i < samples; ++i) {
            double t = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                         static_cast<double>(samples - 1));
            sup = std::max(sup, channel_bound_expr(c, t));
        }
        sup = std::max(sup, channel_bound_limit(c));
    }
    if (!finite(sup)) throw numeric_error("channel bound expression is unbounded on the scan range");
    return sup;
}

// --- pointwise phase flow -------------------------------------------------
// One phase step of the splitting scheme: multiplies each grid value by
// exp(i (2 lambda L_eps(|u|) + sum_j mu1_j g~_j(|u|^2)) dt).  The exponent is
// purely imaginary, so moduli are preserved exactly and mass is conserved by
// construction.  The mu1 term is the compensator drift of the truncated jump
// noise, which is exact for finite-activity measures.

inline void apply_log_phase_inplace(field& u, double lambda, double dt,
                                    const eps_param& eps, const std::vector<double>& mu1,
                                    const noise_channel_set& ch) {
    require(static_cast<int>(mu1.size()) == ch.m(),
            "apply_log_phase: mu1 size must match channel count");
    require(finite(dt) && finite(lambda), "apply_log_phase: dt and lambda must be finite");
    const int m = ch.m();
    for (auto& z : u.v) {
        double r = std::abs(z);
        double phase = 2.0 * lambda * l_eps(r, eps);
        double r2 = r * r;
        for (int j = 0; j < m; ++j) {
            if (mu1[static_cast<std::size_t>(j)] != 0.0)
                phase += mu1[static_cast<std::size_t>(j)] *
                         gtilde(ch.channels[static_cast<std::size_t>(j)], r2);
        }
        z *= std::polar(1.0, phase * dt);
    }
}

inline field apply_log_phase(const field& u, double lambda, double dt, const eps_param& eps,
                             const std::vector<double>& mu1, const noise_channel_set& ch) {
    field out = u;
    apply_log_phase_inplace(out, lambda, dt, eps, mu1, ch);
    return out;
}

// Unregularized logarithmic nonlinearity u log|u|^2, with 0 log 0 = 0.
inline field log_nonlinearity(const field& u) {
    field out = u;
    for (auto& z : out.v) {
        double r2 = std::norm(z);
        z = r2 > 0.0 ? z * std::log(r2) : cplx(0.0, 0.0);
    }
    return out;
}

// --- functionals ----------------------------------------------------------

// F(s) = -s^2 log(s^2), F(0) = 0; entropy_F(u) = ∫ F(|u|) dx.
inline double entropy_F(const field& u) {
    double s = 0.0;
    for (const auto& z : u.v) {
        double r2 = std::norm(z);
        if (r2 > 0.0) s -= r2 * std::log(r2);
    }
    return s * u.g.cell_volume();
}

// Convex C^1 Orlicz integrand: N(s) = -s^2 log(s^2) on [0, e^{-3}], continued
// quadratically by 3 s^2 + 4 e^{-3} s - e^{-6} beyond (values and derivatives
// match at s = e^{-3}: both branches give 6 e^{-6} and 10 e^{-3}).
inline double orlicz_N(double s) {
    require(s >= 0.0 && finite(s), "orlicz_N: s must be finite and >= 0");
    const double knot = std::exp(-3.0);
    if (s <= knot) {
        double s2 = s * s;
        return s2 > 0.0 ? -s2 * std::log(s2) : 0.0;
    }
    return 3.0 * s * s + 4.0 * knot * s - knot * knot;
}

inline double orlicz_integral(const field& u, double k) {
    double s = 0.0;
    for (const auto& z : u.v) s += orlicz_N(std::abs(z) / k);
    return s * u.g.cell_volume();
}

// Luxembourg norm: the unique k > 0 with ∫ N(|u|/k) dx = 1 (0 for u = 0).
// k -> ∫N(|u|/k) is strictly decreasing where positive, so bisection applies.
inline double luxembourg_norm(const field& u) {
    double umax = sup_norm(u);
    if (umax == 0.0) return 0.0;
    require(finite(umax), "luxembourg_norm: field must be finite");
    double lo = 1e-12 * umax, hi = 1e12 * umax;
    int guard = 0;
    while (orlicz_integral(u, hi) > 1.0) {
        hi *= 2.0;
        require(++guard < 200, "luxembourg_norm: bracket expansion failed (hi)");
    }
    guard = 0;
    while (orlicz_integral(u, lo) < 1.0) {
        lo *= 0.5;
        require(++guard < 200, "luxembourg_norm: bracket expansion failed (lo)");
    }
    for (int it = 0; it < 400 && (hi - lo) > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (orlicz_integral(u, mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// W-norm: H^1 norm plus the Luxembourg norm.
inline double w_norm(const field& u) { return h1_norm(u) + luxembourg_norm(u); }

// Energy E(u) = 1/2 ||grad u||^2 - (lambda/2) ∫ |u|^2 log|u|^2 dx.
inline double energy(const field& u, double lambda) {
    double grads = 0.0;
    field hat = u;
    fft_field(hat, false);
    const grid& g = u.g;
    for (std::size_t idx = 0; idx < g.npts; ++idx) {
        auto id = unravel(idx, g.d, g.n);
        double k2 = 0.0;
        for (int a = 0; a < g.d; ++a) {
            double k = g.wavenumbers[static_cast<std::size_t>(id[static_cast<std::size_t>(a)])];
            k2 += k * k;
        }
        grads += k2 * std::norm(hat.v[idx]);
    }
    grads = grads / static_cast<double>(g.npts) * g.cell_volume();
    double logterm = 0.0;
    for (const auto& z : u.v) {
        double r2 = std::norm(z);
        if (r2 > 0.0) logterm += r2 * std::log(r2);
    }
    logterm *= g.cell_volume();
    return 0.5 * grads - 0.5 * lambda * logterm;
}

// --- saturated entropy ----------------------------------------------------
// F_sat_k(l) = ∫_0^l (L_{1/k}(v) + 1) dv on intensities l = |u|^2, evaluated
// by adaptive quadrature of the defining integral (the closed form serves as
// an independent oracle in the tests, not as the implementation).
inline double entropy_F_sat_scalar(double l, int k) {
    require(k >= 2, "entropy_F_sat: k must be an integer >= 2");
    require(l >= 0.0 && finite(l), "entropy_F_sat: intensity must be finite and >= 0");
    if (l == 0.0) return 0.0;
    eps_param ek(1.0 / static_cast<double>(k));
    auto integrand = [&ek](double v) { return l_eps(v, ek) + 1.0; };
    return adaptive_simpson(integrand, 0.0, l, 1e-12 * std::max(1.0, l));
}

inline double entropy_F_sat(const field& u, int k) {
    double s = 0.0;
    for (const auto& z : u.v) s += entropy_F_sat_scalar(std::norm(z), k);
    return s * u.g.cell_volume();
}

// Weight in the entropy-balance identity:
//   d/dt ∫F_sat_k(|u|^2) dx = 4 ∫ fk_weight(|u|^2) Re(ū∇u)·Im(ū∇u) dx,
// fk_weight(l) = L'_{1/k}(l) = (1 - k^{-2}) / ((l + 1/k)(1 + l/k)).
inline double fk_weight(double l, int k) {
    double ik = 1.0 / static_cast<double>(k);
    return (1.0 - ik * ik) / ((l + ik) * (1.0 + l * ik));
}

}  // namespace slogse
