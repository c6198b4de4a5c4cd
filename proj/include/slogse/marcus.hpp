#pragma once

// Canonical (Marcus) jump map for channels g_j(y) = g~_j(|y|^2) y.
//
// The mark flow solves dPhi/ds = -i sum_j z_j g_j(Phi), Phi(0) = y.  Because
// every g_j is modulus times a real multiple of the state, |Phi| is constant
// along the flow, so theta(z, y) = sum_j z_j g~_j(|y|^2) is a first integral
// and the flow closes to a pure phase rotation:
//   Phi(s, z, y) = exp(-i s theta(z, y)) y.
// An explicit RK4 integration of the same ODE is kept as an independent
// oracle for that closed form.

#include <cmath>
#include <complex>
#include <vector>

#include "core.hpp"
#include "grid.hpp"
#include "nonlinearity.hpp"

namespace slogse {

inline double mark_norm(const std::vector<double>& z) {
    double s = 0.0;
    for (double x : z) s += x * x;
    return std::sqrt(s);
}

// Jump mark: a point of R^m in the punctured closed unit ball.
struct mark {
    std::vector<double> z;
    explicit mark(std::vector<double> zz) : z(std::move(zz)) {
        require(!z.empty(), "mark: empty component vector");
        for (double x : z) require(finite(x), "mark: components must be finite");
        double r = mark_norm(z);
        require(r > 0.0 && r <= 1.0, "mark: |z| must lie in (0, 1]");
    }
    int dim() const { return static_cast<int>(z.size()); }
};

inline double theta_of(const std::vector<double>& z, const noise_channel_set& ch, double r2) {
    double t = 0.0;
    for (int j = 0; j < ch.m(); ++j)
        t += z[static_cast<std::size_t>(j)] * gtilde(ch.channels[static_cast<std::size_t>(j)], r2);
    return t;
}

inline void check_mark_channels(const mark& z, const noise_channel_set& ch) {
    require(z.dim() == ch.m(), "mark dimension must match channel count");
}

// Closed-form mark flow at time s in [0, 1].
inline cplx phi_closed(double s, const mark& z, cplx y, const noise_channel_set& ch) {
    check_mark_channels(z, ch);
    require(s >= 0.0 && s <= 1.0, "phi: flow time must lie in [0, 1]");
    double theta = theta_of(z.z, ch, std::norm(y));
    return std::polar(1.0, -s * theta) * y;
}

// RK4 oracle for the same ODE.
inline cplx phi_ode(double s, const mark& z, cplx y, const noise_channel_set& ch,
                    int nsteps = 256) {
    check_mark_channels(z, ch);
    require(s >= 0.0 && s <= 1.0, "phi: flow time must lie in [0, 1]");
    require(nsteps >= 1, "phi_ode: nsteps must be >= 1");
    auto rhs = [&](cplx w) -> cplx {
        return cplx(0.0, -1.0) * (theta_of(z.z, ch, std::norm(w)) * w);
    };
    double h = s / static_cast<double>(nsteps);
    cplx w = y;
    for (int i = 0; i < nsteps; ++i) {
        cplx k1 = rhs(w);
        cplx k2 = rhs(w + 0.5 * h * k1);
        cplx k3 = rhs(w + 0.5 * h * k2);
        cplx k4 = rhs(w + h * k3);
        w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return w;
}

// Jump increment G(z, y) = Phi(1, z, y) - y = (e^{-i theta} - 1) y, written
// through 2 sin^2(theta/2) so the real part stays accurate for small theta.
inline cplx jump_increment_G(const mark& z, cplx y, const noise_channel_set& ch) {
    check_mark_channels(z, ch);
    double theta = theta_of(z.z, ch, std::norm(y));
    double sh = std::sin(0.5 * theta);
    return cplx(-2.0 * sh * sh, -std::sin(theta)) * y;
}

// Compensator integrand H(z, y) = G(z, y) + i theta y
//                               = (cos(theta) - 1 + i (theta - sin(theta))) y,
// which is O(theta^2) |y| near zero.
inline cplx compensator_H(const mark& z, cplx y, const noise_channel_set& ch) {
    check_mark_channels(z, ch);
    double theta = theta_of(z.z, ch, std::norm(y));
    double sh = std::sin(0.5 * theta);
    return cplx(-2.0 * sh * sh, theta - std::sin(theta)) * y;
}

// Applies the time-1 mark flow at every grid point (the solver's jump step).
// Multiplying by a unit phase preserves each modulus exactly.
inline void apply_jump_inplace(field& u, const mark& z, const noise_channel_set& ch) {
    check_mark_channels(z, ch);
    for (auto& w : u.v) {
        double theta = theta_of(z.z, ch, std::norm(w));
        w *= std::polar(1.0, -theta);
    }
}

inline field apply_jump(const field& u, const mark& z, const noise_channel_set& ch) {
    field out = u;
    apply_jump_inplace(out, z, ch);
    return out;
}

}  // namespace slogse
