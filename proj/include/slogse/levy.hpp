#pragma once

// Finite-activity Lévy mark measures on R^m, their exact moments, Poisson
// path sampling, empirical moment summaries, and the NPATH1 text format.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "rng.hpp"

namespace slogse {

// Supported measures:
//   atomic:       nu = sum_i w_i delta_{z_i}, atoms in the punctured unit ball
//   radial_power: nu = c r^{-1-alpha} dr (x) surface measure on S^{m-1},
//                 truncated to the shell delta_cut < r <= 1 (finite activity)
struct levy_measure_spec {
    enum class kind_t { atomic, radial_power } kind = kind_t::atomic;
    // atomic
    std::vector<std::pair<std::vector<double>, double>> atoms;  // (mark, weight)
    // radial_power
    int m = 1;
    double alpha = 0.5;
    double c = 1.0;
    double delta_cut = 0.01;

    int dim() const {
        if (kind == kind_t::radial_power) return m;
        return atoms.empty() ? m : static_cast<int>(atoms.front().first.size());
    }
};

inline void validate_measure(const levy_measure_spec& spec) {
    if (spec.kind == levy_measure_spec::kind_t::atomic) {
        int m = spec.dim();
        require(m >= 1, "atomic measure: mark dimension must be >= 1");
        for (const auto& [z, w] : spec.atoms) {
            require(static_cast<int>(z.size()) == m, "atomic measure: inconsistent mark dimensions");
            require(finite(w) && w > 0.0, "atomic measure: weights must be positive");
            double r2 = 0.0;
            for (double x : z) {
                require(finite(x), "atomic measure: marks must be finite");
                r2 += x * x;
            }
            require(r2 > 0.0 && r2 <= 1.0 + 1e-15, "atomic measure: atoms must lie in 0 < |z| <= 1");
        }
    } else {
        require(spec.m >= 1, "radial measure: m must be >= 1");
        require(spec.alpha > 0.0 && spec.alpha < 2.0, "radial measure: alpha must lie in (0, 2)");
        require(finite(spec.c) && spec.c > 0.0, "radial measure: c must be positive");
        require(spec.delta_cut > 0.0 && spec.delta_cut < 1.0,
                "radial measure: delta_cut must lie in (0, 1); the truncation keeps the mass finite");
    }
}

inline double unit_sphere_area(int m) {
    // |S^{m-1}| = 2 pi^{m/2} / Gamma(m/2)
    return 2.0 * std::pow(pi, 0.5 * m) / std::tgamma(0.5 * m);
}

struct levy_moments {
    double mass = 0.0;          // nu(R^m)
    std::vector<double> mu1;    // ∫ z_j nu(dz)
    double mu2 = 0.0;           // ∫ |z|^2 nu(dz)
};

inline levy_moments moments(const levy_measure_spec& spec) {
    validate_measure(spec);
    levy_moments mom;
    int m = spec.dim();
    mom.mu1.assign(static_cast<std::size_t>(m), 0.0);
    if (spec.kind == levy_measure_spec::kind_t::atomic) {
        for (const auto& [z, w] : spec.atoms) {
            mom.mass += w;
            double r2 = 0.0;
            for (int j = 0; j < m; ++j) {
                mom.mu1[static_cast<std::size_t>(j)] += w * z[static_cast<std::size_t>(j)];
                r2 += z[static_cast<std::size_t>(j)] * z[static_cast<std::size_t>(j)];
            }
            mom.mu2 += w * r2;
        }
    } else {
        double A = unit_sphere_area(m) * spec.c;
        double a = spec.alpha, d = spec.delta_cut;
        mom.mass = A * (std::pow(d, -a) - 1.0) / a;
        mom.mu2 = A * (1.0 - std::pow(d, 2.0 - a)) / (2.0 - a);
        // mu1 = 0 by the symmetry of the surface measure.
    }
    return mom;
}

struct noise_event {
    double tau;
    std::vector<double> z;
};

// One realized path of the driving compound-Poisson noise on [0, T].
struct noise_path {
    double T = 0.0;
    std::uint64_t seed = 0;
    int m = 1;
    std::vector<double> mu1;
    double mu2 = 0.0;
    std::vector<noise_event> events;  // strictly increasing times in (0, T]
};

inline void validate_path(const noise_path& p) {
    require(p.T > 0.0 && finite(p.T), "noise path: T must be positive");
    require(p.m >= 1 && static_cast<int>(p.mu1.size()) == p.m, "noise path: mu1 size mismatch");
    double prev = 0.0;
    for (const auto& ev : p.events) {
        require(finite(ev.tau) && ev.tau > prev && ev.tau <= p.T,
                "noise path: event times must be strictly increasing in (0, T]");
        prev = ev.tau;
        require(static_cast<int>(ev.z.size()) == p.m, "noise path: mark dimension mismatch");
        double r2 = 0.0;
        for (double x : ev.z) {
            require(finite(x), "noise path: marks must be finite");
            r2 += x * x;
        }
        require(r2 > 0.0 && r2 <= 1.0 + 1e-15, "noise path: marks must lie in 0 < |z| <= 1");
    }
}

// Samples a path: count ~ Poisson(mass T), order statistics of uniforms for
// the times (exact ties broken by an upward nudge), then i.i.d. marks.  The
// draw order (count, times, marks) is fixed, so a (spec, T, seed) triple maps
// to exactly one path on every platform and thread count.
inline noise_path sample_path(const levy_measure_spec& spec, double T, std::uint64_t seed) {
    validate_measure(spec);
    require(T > 0.0 && finite(T), "sample_path: T must be positive");
    levy_moments mom = moments(spec);
    noise_path path;
    path.T = T;
    path.seed = seed;
    path.m = spec.dim();
    path.mu1 = mom.mu1;
    path.mu2 = mom.mu2;

    rng gen(seed);
    std::uint64_t count = gen.poisson(mom.mass * T);
    std::vector<double> times(count);
    for (auto& t : times) t = T * gen.uniform_pos();
    std::sort(times.begin(), times.end());
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            times[i] = std::nextafter(times[i - 1], 1e300);

    path.events.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        noise_event ev;
        ev.tau = times[i];
        if (spec.kind == levy_measure_spec::kind_t::atomic) {
            double u = gen.uniform01() * mom.mass;
            double acc = 0.0;
            std::size_t pick = spec.atoms.size() - 1;
            for (std::size_t a = 0; a < spec.atoms.size(); ++a) {
                acc += spec.atoms[a].second;
                if (u < acc) {
                    pick = a;
                    break;
                }
            }
            ev.z = spec.atoms[pick].first;
        } else {
            // Radius by inverse CDF: r = (d^{-a} - U (d^{-a} - 1))^{-1/a},
            // U in (0, 1] so r lands in (delta_cut, 1].
            double a = spec.alpha, d = spec.delta_cut;
            double da = std::pow(d, -a);
            double x = da - gen.uniform_pos() * (da - 1.0);
            double r = std::pow(x, -1.0 / a);
            ev.z = gen.sphere(spec.m);
            for (auto& comp : ev.z) comp *= r;
        }
        path.events.push_back(std::move(ev));
    }
    validate_path(path);
    return path;
}

struct empirical_summary {
    std::size_t paths = 0;
    double mean_count = 0.0, se_count = 0.0;    // vs mass * T
    double mean_jump2 = 0.0, se_jump2 = 0.0;    // sum |z|^2 per path, vs mu2 * T
    std::vector<double> mean_z, se_z;           // sum z_j per path, vs mu1_j * T
};

inline empirical_summary empirical_moments(const std::vector<noise_path>& paths) {
    require(!paths.empty(), "empirical_moments: need at least one path");
    int m = paths.front().m;
    std::size_t P = paths.size();
    empirical_summary out;
    out.paths = P;
    out.mean_z.assign(static_cast<std::size_t>(m), 0.0);
    out.se_z.assign(static_cast<std::size_t>(m), 0.0);
    std::vector<double> counts, jump2;
    std::vector<std::vector<double>> zsums(static_cast<std::size_t>(m));
    counts.reserve(P);
    jump2.reserve(P);
    for (auto& v : zsums) v.reserve(P);
    for (const auto& p : paths) {
        require(p.m == m, "empirical_moments: inconsistent mark dimensions");
        counts.push_back(static_cast<double>(p.events.size()));
        double j2 = 0.0;
        std::vector<double> zs(static_cast<std::size_t>(m), 0.0);
        for (const auto& ev : p.events)
            for (int j = 0; j < m; ++j) {
                double x = ev.z[static_cast<std::size_t>(j)];
                zs[static_cast<std::size_t>(j)] += x;
                j2 += x * x;
            }
        jump2.push_back(j2);
        for (int j = 0; j < m; ++j) zsums[static_cast<std::size_t>(j)].push_back(zs[static_cast<std::size_t>(j)]);
    }
    auto mean_se = [P](const std::vector<double>& xs, double& mean, double& se) {
        double s = 0.0;
        for (double x : xs) s += x;
        mean = s / static_cast<double>(P);
        double v = 0.0;
        for (double x : xs) v += (x - mean) * (x - mean);
        v = P > 1 ? v / static_cast<double>(P - 1) : 0.0;
        se = std::sqrt(v / static_cast<double>(P));
    };
    mean_se(counts, out.mean_count, out.se_count);
    mean_se(jump2, out.mean_jump2, out.se_jump2);
    for (int j = 0; j < m; ++j)
        mean_se(zsums[static_cast<std::size_t>(j)], out.mean_z[static_cast<std::size_t>(j)],
                out.se_z[static_cast<std::size_t>(j)]);
    return out;
}

// --- NPATH1 text format ----------------------------------------------------
// Header:  NPATH1 T=<f64> seed=<u64> m=<u32> mu1=<csv f64> mu2=<f64>
// Body:    one "tau,z_1,...,z_m" line per event, times strictly increasing.
// Floats use 17 significant digits, which round-trips IEEE doubles exactly.

namespace detail {
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_f64(const std::string& tok, const std::string& what) {
    const char* s = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0') throw io_error("NPATH1: bad " + what + ": '" + tok + "'");
    return v;
}
}  // namespace detail

inline void write_noise_path(const noise_path& p, const std::string& path) {
    validate_path(p);
    std::ofstream f(path, std::ios::binary);  // binary: exact bytes, LF newlines
    if (!f) throw io_error("cannot open for writing: " + path);
    f << "NPATH1 T=" << detail::fmt_g17(p.T) << " seed=" << p.seed << " m=" << p.m << " mu1=";
    for (int j = 0; j < p.m; ++j) {
        if (j) f << ',';
        f << detail::fmt_g17(p.mu1[static_cast<std::size_t>(j)]);
    }
    f << " mu2=" << detail::fmt_g17(p.mu2) << "\n";
    for (const auto& ev : p.events) {
        f << detail::fmt_g17(ev.tau);
        for (double x : ev.z) f << ',' << detail::fmt_g17(x);
        f << "\n";
    }
    if (!f.good()) throw io_error("short write: " + path);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline noise_path read_noise_path(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(f, line)) throw io_error("empty NPATH1 file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream hs(line);
    std::string tag, tT, tseed, tm, tmu1, tmu2;
    hs >> tag >> tT >> tseed >> tm >> tmu1 >> tmu2;
    auto strip = [&](std::string tok, const char* prefix) {
        std::size_t n = std::strlen(prefix);
        if (tok.compare(0, n, prefix) != 0)
            throw io_error("NPATH1: malformed header token '" + tok + "' in " + path);
        return tok.substr(n);
    };
    if (tag != "NPATH1") throw io_error("not an NPATH1 file: " + path);
    noise_path p;
    p.T = detail::parse_f64(strip(tT, "T="), "T");
    {
        std::string s = strip(tseed, "seed=");
        char* end = nullptr;
        p.seed = std::strtoull(s.c_str(), &end, 10);
        if (end == s.c_str() || *end != '\0') throw io_error("NPATH1: bad seed: '" + s + "'");
    }
    p.m = static_cast<int>(detail::parse_f64(strip(tm, "m="), "m"));
    for (const auto& tok : split(strip(tmu1, "mu1="), ','))
        p.mu1.push_back(detail::parse_f64(tok, "mu1"));
    p.mu2 = detail::parse_f64(strip(tmu2, "mu2="), "mu2");
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto toks = split(line, ',');
        if (static_cast<int>(toks.size()) != p.m + 1)
            throw io_error("NPATH1: event line has wrong arity in " + path);
        noise_event ev;
        ev.tau = detail::parse_f64(toks[0], "tau");
        for (int j = 1; j <= p.m; ++j)
            ev.z.push_back(detail::parse_f64(toks[static_cast<std::size_t>(j)], "z"));
        p.events.push_back(std::move(ev));
    }
    validate_path(p);
    return p;
}

}  // namespace slogse
