// slogse — command-line driver.
//
// Subcommands:
//   simulate --config F [--out D] [--seed N] [--quiet]   run + diagnostics CSV
//   converge --config F [--eps-list CSV] [--radius R]    epsilon-Cauchy sweep
//   props    --lemma ID [--samples N] [--seed N]         inequality scans
//   norms    FILE.cfld                                   norms of a stored field
//   noise    --config F [--out D] [--seed N]             sample + summarize paths
//
// Exit codes: 0 success, 1 property violation, 2 usage/config/io error,
// 3 numerical abort (non-finite state).  Every command writes a manifest
// before heavy work; primary outputs are byte-identical across reruns.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "slogse/slogse.hpp"

namespace fs = std::filesystem;
using namespace slogse;

namespace {

std::vector<double> parse_eps_list(const std::string& csv) {
    std::vector<double> out;
    for (const auto& tok : split(csv, ',')) {
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw config_error("--eps-list: expected a number, got '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<double> default_eps_list() {
    std::vector<double> eps;
    for (int k = 1; k <= 7; ++k) eps.push_back(std::pow(2.0, -k));
    return eps;
}

int cmd_simulate(const std::string& cfgpath, const std::string& out, bool have_seed,
                 std::uint64_t seed_flag, bool quiet) {
    config_map cm = config_map::parse_file(cfgpath);
    sim_setup s = load_sim_setup(cm);
    cm.finish();
    if (have_seed) s.seed = seed_flag;

    fs::create_directories(out);
    char extra[128];
    std::snprintf(extra, sizeof extra, "ensemble = %d\nebal_k = %d\n", s.ensemble, s.ebal_k);
    write_manifest(out, "simulate", cfgpath, s.seed, extra);

    for (int p = 0; p < s.ensemble; ++p) {
        std::string dir = out;
        if (s.ensemble > 1) {
            char sub[32];
            std::snprintf(sub, sizeof sub, "/member_%04d", p);
            dir += sub;
            fs::create_directories(dir);
        }
        noise_path path = sample_path(s.measure, s.cfg.T, s.seed + static_cast<std::uint64_t>(p));
        trajectory traj = run(s.cfg, path, s.u0);
        fill_entropy_balance(traj, s.ebal_k);
        write_diagnostics_csv(traj, dir + "/diagnostics.csv");
        write_noise_path(path, dir + "/path.npath");
        if (s.write_states)
            for (std::size_t i = 0; i < traj.states.size(); ++i) {
                char name[48];
                std::snprintf(name, sizeof name, "/state_%04zu.cfld", i);
                write_field(traj.states[i], dir + name);
            }
        if (!quiet) {
            double m0 = std::sqrt(traj.diag.mass.front());
            double drift = 0.0;
            for (double m : traj.diag.mass)
                drift = std::max(drift, std::abs(std::sqrt(m) - m0) / m0);
            std::printf("simulate[%d]: %zu samples, %zu events, relative mass drift %.3e\n", p,
                        traj.times.size(), path.events.size(), drift);
        }
    }
    if (!quiet) std::printf("simulate: outputs in %s\n", out.c_str());
    return 0;
}

int cmd_converge(const std::string& cfgpath, const std::string& out, bool have_seed,
                 std::uint64_t seed_flag, const std::string& eps_csv, bool have_radius,
                 double radius, bool quiet) {
    config_map cm = config_map::parse_file(cfgpath);
    sim_setup s = load_sim_setup(cm);
    cm.finish();
    if (have_seed) s.seed = seed_flag;
    std::vector<double> eps = eps_csv.empty() ? default_eps_list() : parse_eps_list(eps_csv);
    double R = have_radius ? radius : s.cfg.g.ell / 8.0;

    fs::create_directories(out);
    char extra[64];
    std::snprintf(extra, sizeof extra, "R = %.17g\nensemble = %d\n", R, s.ensemble);
    write_manifest(out, "converge", cfgpath, s.seed, extra);

    sweep_report rep = cauchy_sweep(s.cfg, s.measure, s.seed, eps, R, s.u0, s.ensemble);
    write_sweep_csv(rep, out + "/sweep.csv");
    if (!quiet) {
        std::printf("converge: %zu epsilon values, D(first) = %.6e, D(last) = %.6e, order %.3f\n",
                    eps.size(), rep.pair_D.front(), rep.pair_D.back(), rep.fit_order);
        std::printf("converge: sweep written to %s/sweep.csv\n", out.c_str());
    }
    return 0;
}

int cmd_props(const std::string& lemma, std::uint64_t samples, std::uint64_t seed,
              const std::string& out, bool quiet) {
    scan_report rep = inequality_scan(lemma, samples, seed);
    fs::create_directories(out);
    char extra[96];
    std::snprintf(extra, sizeof extra, "lemma = %s\nsamples = %llu\n", lemma.c_str(),
                  static_cast<unsigned long long>(samples));
    write_manifest(out, "props", "<none>", seed, extra);
    write_scan_csv(rep, out + "/scan_" + lemma + ".csv");

    std::uint64_t exact_viol = 0;
    for (const auto& r : rep.rows) {
        if (lemma_is_exact(r.lemma)) exact_viol += r.violations;
        if (!quiet)
            std::printf("props: %-4s delta=%-4g alpha=%-4g violations=%llu worst=%.3e\n",
                        r.lemma.c_str(), r.delta, r.alpha,
                        static_cast<unsigned long long>(r.violations), r.worst_slack);
    }
    if (exact_viol > 0) {
        std::fprintf(stderr, "props: %llu violation(s) of an exact bound\n",
                     static_cast<unsigned long long>(exact_viol));
        return 1;
    }
    return 0;
}

int cmd_norms(const std::string& file) {
    field u = read_field(file);
    std::printf("l2 = %.17g\n", l2_norm(u));
    std::printf("h1 = %.17g\n", h1_norm(u));
    std::printf("orlicz = %.17g\n", luxembourg_norm(u));
    std::printf("w = %.17g\n", w_norm(u));
    std::printf("entropyF = %.17g\n", entropy_F(u));
    std::printf("energy_lambda1 = %.17g\n", energy(u, 1.0));
    return 0;
}

int cmd_noise(const std::string& cfgpath, const std::string& out, bool have_seed,
              std::uint64_t seed_flag, bool quiet) {
    config_map cm = config_map::parse_file(cfgpath);
    int m = static_cast<int>(cm.get_int("channels.m", 1));
    levy_measure_spec spec = load_measure(cm, m);
    double T = cm.get_double("time.T", 1.0);
    std::uint64_t seed = cm.get_u64("run.seed", 42);
    int ensemble = static_cast<int>(cm.get_int("run.ensemble", 1));
    require(ensemble >= 1, "run.ensemble must be >= 1");
    cm.finish();
    if (have_seed) seed = seed_flag;

    fs::create_directories(out);
    char extra[64];
    std::snprintf(extra, sizeof extra, "ensemble = %d\n", ensemble);
    write_manifest(out, "noise", cfgpath, seed, extra);

    std::vector<noise_path> paths;
    paths.reserve(static_cast<std::size_t>(ensemble));
    for (int p = 0; p < ensemble; ++p)
        paths.push_back(sample_path(spec, T, seed + static_cast<std::uint64_t>(p)));
    write_noise_path(paths.front(), out + "/path.npath");

    levy_moments mom = moments(spec);
    empirical_summary emp = empirical_moments(paths);
    if (!quiet) {
        std::printf("noise: %zu path(s), mean count %.6g (exact %.6g), mean sum|z|^2 %.6g (exact %.6g)\n",
                    emp.paths, emp.mean_count, mom.mass * T, emp.mean_jump2, mom.mu2 * T);
        std::printf("noise: path written to %s/path.npath\n", out.c_str());
    }
    if (ensemble >= 30) {  // hypothesis test only in the CLT regime
        bool bad_count = emp.se_count > 0.0 &&
                         std::abs(emp.mean_count - mom.mass * T) > 3.0 * emp.se_count;
        bool bad_jump2 = emp.se_jump2 > 0.0 &&
                         std::abs(emp.mean_jump2 - mom.mu2 * T) > 3.0 * emp.se_jump2;
        if (bad_count || bad_jump2) {
            std::fprintf(stderr, "noise: empirical moments outside the 3-sigma band\n");
            return 1;
        }
    } else if (!quiet && ensemble > 1) {
        std::printf("noise: ensemble < 30, moment check reported but not enforced\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and verification suite for a regularized logarithmic "
                 "Schrodinger equation with saturated multiplicative jump noise"};
    app.require_subcommand(1);

    std::string config, out = "out", eps_csv, lemma, norms_file;
    std::uint64_t seed_flag = 0, samples = 1000000, props_seed = 1;
    double radius = 0.0;
    bool quiet = false;

    auto* sim = app.add_subcommand("simulate", "Run the equation and write diagnostics");
    sim->add_option("--config", config, "config file")->required();
    sim->add_option("--out", out, "output directory (default: out)");
    auto* sim_seed = sim->add_option("--seed", seed_flag, "noise seed override");
    sim->add_flag("--quiet", quiet, "suppress progress output");

    auto* conv = app.add_subcommand("converge", "Shared-noise epsilon-Cauchy sweep");
    conv->add_option("--config", config, "config file")->required();
    conv->add_option("--out", out, "output directory (default: out)");
    auto* conv_seed = conv->add_option("--seed", seed_flag, "noise seed override");
    conv->add_option("--eps-list", eps_csv, "comma-separated strictly decreasing eps values");
    auto* conv_radius = conv->add_option("--radius", radius, "localization radius (default ell/8)");
    conv->add_flag("--quiet", quiet, "suppress progress output");

    auto* props = app.add_subcommand("props", "Randomized inequality scans");
    props->add_option("--lemma", lemma, "bound id: a b qm c0 c d mod lip gmap hmap all")
        ->required();
    props->add_option("--samples", samples, "sample count (default 1e6)");
    props->add_option("--seed", props_seed, "scan seed (default 1)");
    props->add_option("--out", out, "output directory (default: out)");
    props->add_flag("--quiet", quiet, "suppress per-row output");

    auto* norms = app.add_subcommand("norms", "Print the norms of a CFLD1 field file");
    norms->add_option("file", norms_file, "CFLD1 field file")->required();

    auto* noise = app.add_subcommand("noise", "Sample noise paths and summarize moments");
    noise->add_option("--config", config, "config file")->required();
    noise->add_option("--out", out, "output directory (default: out)");
    auto* noise_seed = noise->add_option("--seed", seed_flag, "seed override");
    noise->add_flag("--quiet", quiet, "suppress summary output");

    try {
        app.parse(argc, argv);
        if (sim->parsed())
            return cmd_simulate(config, out, sim_seed->count() > 0, seed_flag, quiet);
        if (conv->parsed())
            return cmd_converge(config, out, conv_seed->count() > 0, seed_flag, eps_csv,
                                conv_radius->count() > 0, radius, quiet);
        if (props->parsed()) return cmd_props(lemma, samples, props_seed, out, quiet);
        if (norms->parsed()) return cmd_norms(norms_file);
        if (noise->parsed())
            return cmd_noise(config, out, noise_seed->count() > 0, seed_flag, quiet);
        return 2;  // unreachable: require_subcommand(1)
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numeric abort: %s\n", e.what());
        return 3;
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
