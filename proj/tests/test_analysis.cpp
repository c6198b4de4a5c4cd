#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "slogse/analysis.hpp"

using namespace slogse;

namespace {

levy_measure_spec atomic_pair() {
    levy_measure_spec s;
    s.kind = levy_measure_spec::kind_t::atomic;
    s.atoms = {{{0.5}, 2.0}, {{-0.4}, 3.0}};
    return s;
}

levy_measure_spec empty_measure() {
    levy_measure_spec s;
    s.kind = levy_measure_spec::kind_t::atomic;
    s.m = 1;
    return s;
}

struct env_threads {
    explicit env_threads(const char* v) { setenv("SLOGSE_THREADS", v, 1); }
    ~env_threads() { unsetenv("SLOGSE_THREADS"); }
};

}  // namespace

TEST_CASE("exact scalar-bound scans report zero violations") {
    for (const char* id : {"a", "b", "qm", "c0"}) {
        scan_report rep = inequality_scan(id, 200000, 11);
        REQUIRE(rep.rows.size() == 1);
        INFO("lemma " << id << " worst slack " << rep.rows[0].worst_slack);
        CHECK(rep.rows[0].violations == 0);
        CHECK(rep.rows[0].worst_slack <= scan_slack);
        CHECK(rep.rows[0].samples == 200000);
    }
}

TEST_CASE("calibrated scans hold on the odd-index half at twice the margin") {
    scan_report c = inequality_scan("c", 100000, 17);
    REQUIRE(c.rows.size() == 3);  // one row per delta
    for (const auto& r : c.rows) {
        INFO("delta " << r.delta << " constant " << r.cal_constant);
        CHECK(r.violations == 0);
        CHECK(r.cal_constant > 0.0);
        CHECK(r.alpha == 0.0);
    }
    CHECK(c.total_violations() == 0);

    scan_report d = inequality_scan("d", 100000, 17);
    REQUIRE(d.rows.size() == 9);  // delta x alpha
    for (const auto& r : d.rows) {
        INFO("delta " << r.delta << " alpha " << r.alpha << " constant " << r.cal_constant);
        CHECK(r.violations == 0);
        CHECK(r.cal_constant > 0.0);
    }
}

TEST_CASE("jump-map scans stay below the frozen constants") {
    for (const char* id : {"mod", "lip", "gmap", "hmap"}) {
        scan_report rep = inequality_scan(id, 100000, 23);
        REQUIRE(rep.rows.size() == 1);
        INFO("lemma " << id << " worst slack " << rep.rows[0].worst_slack);
        CHECK(rep.rows[0].violations == 0);
    }
    CHECK(inequality_scan("gmap", 1000, 1).rows[0].cal_constant == frozen_Cprime_G);
    CHECK(inequality_scan("hmap", 1000, 1).rows[0].cal_constant == frozen_Cdprime_H);
    // The flow Lipschitz rate is pinned by the channel-bound constant.
    double K = k_gtilde_estimate(default_scan_channels());
    CHECK(inequality_scan("lip", 1000, 1).rows[0].cal_constant ==
          Catch::Approx(3.0 * K * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("the all scan aggregates every row") {
    scan_report rep = inequality_scan("all", 4000, 5);
    CHECK(rep.rows.size() == 4 + 3 + 9 + 4);
    CHECK(rep.total_violations() == 0);
    CHECK(rep.lemma == "all");
}

TEST_CASE("scans are invariant under the worker count") {
    scan_report serial, wide;
    {
        env_threads guard("1");
        serial = inequality_scan("all", 30000, 3);
    }
    {
        env_threads guard("7");
        wide = inequality_scan("all", 30000, 3);
    }
    REQUIRE(serial.rows.size() == wide.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CHECK(serial.rows[i].violations == wide.rows[i].violations);
        CHECK(serial.rows[i].worst_slack == wide.rows[i].worst_slack);
        CHECK(serial.rows[i].worst_sample == wide.rows[i].worst_sample);
        CHECK(serial.rows[i].cal_constant == wide.rows[i].cal_constant);
    }
}

TEST_CASE("scan misuse is rejected") {
    CHECK_THROWS_AS(inequality_scan("nope", 100, 1), config_error);
    CHECK_THROWS_AS(inequality_scan("a", 1, 1), config_error);
    CHECK(lemma_is_exact("a"));
    CHECK(lemma_is_exact("qm"));
    CHECK_FALSE(lemma_is_exact("c"));
    CHECK_FALSE(lemma_is_exact("d"));
    CHECK_FALSE(lemma_is_exact("gmap"));
}

TEST_CASE("scan CSV lists one row per lemma variant") {
    scan_report rep = inequality_scan("c", 2000, 9);
    write_scan_csv(rep, "/tmp/slogse_scan.csv");
    std::ifstream f("/tmp/slogse_scan.csv");
    REQUIRE(f.good());
    std::string header;
    std::getline(f, header);
    CHECK(header == "lemma,delta,alpha,samples,violations,worst_slack,worst_sample,constant");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto toks = split(line, ',');
        REQUIRE(toks.size() == 8);
        CHECK(toks[0] == "c");
        CHECK(std::stod(toks[1]) == rep.rows[rows].delta);
        CHECK(std::stoull(toks[4]) == rep.rows[rows].violations);
        CHECK(std::stod(toks[7]) == rep.rows[rows].cal_constant);
        ++rows;
    }
    CHECK(rows == rep.rows.size());
    std::remove("/tmp/slogse_scan.csv");
}

TEST_CASE("nonlinearity convergence is exact on unimodular fields") {
    grid g = make_grid(1, 64, 16.0);
    field u(g);
    for (std::size_t i = 0; i < u.v.size(); ++i) u.v[i] = std::polar(1.0, 0.1 * static_cast<double>(i));
    auto rep = nonlinearity_convergence(u, {0.5, 0.25, 0.125});
    for (double e : rep.err) CHECK(e == 0.0);  // L_eps(1) = 0 = log 1 for every eps
    CHECK(rep.envelope_worst <= 0.0);
}

TEST_CASE("nonlinearity convergence on a Gaussian decays with order at least 1/2") {
    grid g = make_grid(1, 256, 16.0);
    field u = make_gaussian(g, 1.0, 1.5);
    std::vector<double> eps;
    for (int k = 1; k <= 7; ++k) eps.push_back(std::pow(2.0, -k));
    auto rep = nonlinearity_convergence(u, eps);
    REQUIRE(rep.err.size() == eps.size());
    for (std::size_t i = 1; i < rep.err.size(); ++i) CHECK(rep.err[i] < rep.err[i - 1]);
    CHECK(rep.fit_order >= 0.5);
    CHECK(rep.envelope_worst <= 0.0);  // pointwise envelope holds at the 2x margin
    CHECK(rep.envelope_C > 0.0);

    CHECK_THROWS_AS(nonlinearity_convergence(u, {0.5}), config_error);
    CHECK_THROWS_AS(nonlinearity_convergence(u, {0.25, 0.5}), config_error);
    CHECK_THROWS_AS(nonlinearity_convergence(u, {1.5, 0.5}), config_error);
}

TEST_CASE("epsilon-Cauchy sweep distances shrink as the regularization refines") {
    solver_config base;
    base.g = make_grid(1, 64, 16.0);
    base.lambda = -1.0;
    base.dt = 5e-3;
    base.T = 0.25;
    base.channels.channels.push_back({channel_family::photorefractive, 1.0, 0.0});
    base.sample_times = uniform_sample_times(base.T, 6);
    field u0 = make_gaussian(base.g, 1.0, 1.5);

    std::vector<double> eps;
    for (int k = 1; k <= 6; ++k) eps.push_back(std::pow(2.0, -k));
    sweep_report rep = cauchy_sweep(base, empty_measure(), 1, eps, 2.0, u0);

    REQUIRE(rep.pair_D.size() == 5);
    REQUIRE(rep.pair_gap.size() == 5);
    CHECK(rep.pair_gap[0] == Catch::Approx(0.25).margin(1e-15));
    for (double D : rep.pair_D) CHECK(D > 0.0);
    CHECK(rep.pair_D.back() < 0.8 * rep.pair_D.front());
    CHECK(rep.fit_order > 0.3);
    REQUIRE(rep.max_h1.size() == eps.size());
    REQUIRE(rep.max_abs_entropy.size() == eps.size());
    for (double h : rep.max_h1) CHECK(h > 0.0);

    write_sweep_csv(rep, "/tmp/slogse_sweep.csv");
    std::ifstream f("/tmp/slogse_sweep.csv");
    REQUIRE(f.good());
    std::string header;
    std::getline(f, header);
    CHECK(header == "eps_hi,eps_lo,gap,D,max_h1_hi,max_abs_entropy_hi");
    std::size_t data_rows = 0, comment_rows = 0;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            ++comment_rows;
            continue;
        }
        REQUIRE(split(line, ',').size() == 6);
        ++data_rows;
    }
    CHECK(data_rows == 5);
    CHECK(comment_rows == 3);
    std::remove("/tmp/slogse_sweep.csv");
}

TEST_CASE("epsilon-Cauchy sweep shares one noise path across the runs") {
    solver_config base;
    base.g = make_grid(1, 32, 16.0);
    base.dt = 5e-3;
    base.T = 0.2;
    base.channels.channels.push_back({channel_family::photorefractive, 1.0, 0.0});
    base.sample_times = uniform_sample_times(base.T, 3);
    field u0 = make_gaussian(base.g, 1.0, 1.5);
    std::vector<double> eps{0.5, 0.25, 0.125, 0.0625};

    sweep_report a = cauchy_sweep(base, atomic_pair(), 21, eps, 2.0, u0);
    sweep_report b = cauchy_sweep(base, atomic_pair(), 21, eps, 2.0, u0);
    CHECK(a.pair_D == b.pair_D);  // bitwise reproducible
    CHECK(a.max_h1 == b.max_h1);

    sweep_report c = cauchy_sweep(base, atomic_pair(), 22, eps, 2.0, u0, 2);
    CHECK(c.ensemble == 2);
    CHECK(c.pair_D != a.pair_D);  // a different seed moves the distances

    CHECK_THROWS_AS(cauchy_sweep(base, atomic_pair(), 1, {0.5, 0.25, 0.125}, 2.0, u0),
                    config_error);
    CHECK_THROWS_AS(cauchy_sweep(base, atomic_pair(), 1, {0.5, 0.25, 0.25, 0.125}, 2.0, u0),
                    config_error);
    CHECK_THROWS_AS(cauchy_sweep(base, atomic_pair(), 1, {1.5, 0.5, 0.25, 0.125}, 2.0, u0),
                    config_error);
    CHECK_THROWS_AS(cauchy_sweep(base, atomic_pair(), 1, eps, 2.0, u0, 0), config_error);
}

TEST_CASE("mild and strong integrators agree where both are exact") {
    solver_config cfg;
    cfg.g = make_grid(1, 64, 16.0);
    cfg.lambda = 0.0;
    cfg.dt = 1e-2;
    cfg.T = 0.2;
    cfg.channels.channels.push_back({channel_family::photorefractive, 1.0, 0.0});
    cfg.sample_times = uniform_sample_times(cfg.T, 5);
    field u0 = make_plane_bump(cfg.g, 1.0, 1.5, 1.0);
    noise_path silent;
    silent.T = cfg.T;
    silent.m = 1;
    silent.mu1 = {0.0};
    CHECK(mild_strong_crosscheck(cfg, silent, u0, 4) < 1e-12);
}

TEST_CASE("crosscheck distance decays at first order in the oracle refinement") {
    // With dispersion off the splitting scheme applies the exact phase flow, so
    // the crosscheck isolates the oracle's own first-order error.
    solver_config cfg;
    cfg.g = make_grid(1, 32, 16.0);
    cfg.lambda = 1.0;
    cfg.eps = eps_param(1e-2);
    cfg.dispersion_off = true;
    cfg.dt = 1e-2;
    cfg.T = 0.1;
    cfg.channels.channels.push_back({channel_family::photorefractive, 1.0, 0.0});
    cfg.sample_times = {0.0, cfg.T};
    field u0 = make_gaussian(cfg.g, 2.0, 1.5);
    noise_path silent;
    silent.T = cfg.T;
    silent.m = 1;
    silent.mu1 = {0.0};

    double e4 = mild_strong_crosscheck(cfg, silent, u0, 4);
    double e32 = mild_strong_crosscheck(cfg, silent, u0, 32);
    INFO("e4 " << e4 << " e32 " << e32);
    CHECK(e32 < e4);
    double ratio = e4 / e32;
    CHECK(ratio > 5.0);
    CHECK(ratio < 12.0);  // first order: 8x refinement
}

TEST_CASE("full nonlinear crosscheck lands within the expected window") {
    solver_config cfg;
    cfg.g = make_grid(1, 64, 16.0);
    cfg.lambda = 1.0;
    cfg.eps = eps_param(0.5);
    cfg.dt = 1e-3;
    cfg.T = 0.1;
    cfg.channels.channels.push_back({channel_family::photorefractive, 1.0, 0.0});
    cfg.sample_times = {0.0, 0.05, 0.1};
    field u0 = make_gaussian(cfg.g, 1.0, 1.5);
    noise_path silent;
    silent.T = cfg.T;
    silent.m = 1;
    silent.mu1 = {0.0};
    double err = mild_strong_crosscheck(cfg, silent, u0, 8);
    CHECK(err < 1e-3);
    CHECK(err > 0.0);
}
