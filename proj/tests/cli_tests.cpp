// End-to-end tests that drive the slogse binary as a subprocess.
// Usage: cli_tests <path-to-slogse-binary>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "slogse/slogse.hpp"

namespace fs = std::filesystem;
using namespace slogse;

namespace {

int failures = 0;
#define CHECK(cond)                                                             \
    do {                                                                        \
        if (!(cond)) {                                                          \
            ++failures;                                                         \
            std::fprintf(stderr, "FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond); \
        }                                                                       \
    } while (0)

std::string g_cli;
std::string g_dir;

int run_cli(const std::string& args) {
    std::string cmd = g_cli + " " + args + " > " + g_dir + "/stdout.txt 2> " + g_dir + "/stderr.txt";
    int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -2;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string last_stdout() { return read_file(g_dir + "/stdout.txt"); }
std::string last_stderr() { return read_file(g_dir + "/stderr.txt"); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
}

std::string sim_config_text(const std::string& eps_line) {
    return "[grid]\nn = 64\nell = 16\n"
           "[model]\n" + eps_line + "lambda = 1\n"
           "[time]\nT = 0.2\ndt = 1e-3\nsample_count = 6\n"
           "[channels]\nm = 1\nfamily_1 = photorefractive\n"
           "[noise]\nkind = atomic\natoms = 0.5 2 ; -0.4 3\n"
           "[init]\nkind = gaussian\namplitude = 1\nwidth = 1.5\n"
           "[run]\nseed = 5\n";
}

std::vector<std::vector<double>> read_csv(const std::string& path, std::string* header) {
    std::ifstream f(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    if (std::getline(f, line) && header) *header = line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        for (const auto& tok : split(line, ',')) row.push_back(std::strtod(tok.c_str(), nullptr));
        rows.push_back(std::move(row));
    }
    return rows;
}

void test_simulate() {
    std::string cfg = g_dir + "/sim.cfg";
    write_text(cfg, sim_config_text("eps = 1e-2\n"));
    std::string out = g_dir + "/sim_out";
    CHECK(run_cli("simulate --config " + cfg + " --out " + out) == 0);
    CHECK(fs::exists(out + "/manifest.txt"));
    CHECK(fs::exists(out + "/diagnostics.csv"));
    CHECK(fs::exists(out + "/path.npath"));

    std::string header;
    auto rows = read_csv(out + "/diagnostics.csv", &header);
    CHECK(header == "t,mass,h1,entropyF,orliczV,energy,ebal_k10");
    CHECK(rows.size() == 6);
    for (const auto& row : rows) {
        CHECK(row.size() == 7);
        CHECK(std::abs(row[1] - rows[0][1]) < 1e-12 * rows[0][1]);  // constant mass column
    }
    CHECK(last_stdout().find("relative mass drift") != std::string::npos);

    // A missing eps key is a config error that names the key.
    std::string missing = g_dir + "/sim_missing.cfg";
    write_text(missing, sim_config_text(""));
    CHECK(run_cli("simulate --config " + missing + " --out " + out) == 2);
    CHECK(last_stderr().find("model.eps") != std::string::npos);

    // eps outside (0, 1) violates the regularization-parameter invariant.
    std::string bad = g_dir + "/sim_bad.cfg";
    write_text(bad, sim_config_text("eps = 1.5\n"));
    CHECK(run_cli("simulate --config " + bad + " --out " + out) == 2);

    // Unknown keys are fail-closed errors.
    std::string stray = g_dir + "/sim_stray.cfg";
    write_text(stray, sim_config_text("eps = 1e-2\nmystery = 1\n"));
    CHECK(run_cli("simulate --config " + stray + " --out " + out) == 2);
    CHECK(last_stderr().find("mystery") != std::string::npos);

    CHECK(run_cli("simulate --config " + g_dir + "/no_such.cfg --out " + out) == 2);
    CHECK(run_cli("simulate --out " + out) == 2);  // --config is required
}

void test_simulate_numeric_abort() {
    grid g = make_grid(1, 32, 16.0);
    field u(g);
    u.v[5] = cplx(std::numeric_limits<double>::infinity(), 0.0);
    std::string badfield = g_dir + "/bad.cfld";
    write_field(u, badfield);
    std::string cfg = g_dir + "/sim_nan.cfg";
    write_text(cfg,
               "[grid]\nn = 32\nell = 16\n[model]\neps = 1e-2\n"
               "[time]\nT = 0.1\ndt = 1e-2\nsample_count = 2\n"
               "[channels]\nm = 1\n"
               "[init]\nkind = file\nfile = " + badfield + "\n");
    CHECK(run_cli("simulate --config " + cfg + " --out " + g_dir + "/nan_out") == 3);
    CHECK(last_stderr().find("numeric abort") != std::string::npos);
}

void test_converge() {
    std::string cfg = g_dir + "/conv.cfg";
    write_text(cfg,
               "[grid]\nn = 64\nell = 16\n[model]\neps = 1e-2\nlambda = -1\n"
               "[time]\nT = 0.2\ndt = 5e-3\nsample_count = 4\n"
               "[channels]\nm = 1\nfamily_1 = photorefractive\n"
               "[init]\nkind = gaussian\namplitude = 1\nwidth = 1.5\n"
               "[run]\nseed = 3\n");
    std::string out1 = g_dir + "/conv1", out2 = g_dir + "/conv2";
    std::string eps = "0.5,0.25,0.125,0.0625,0.03125";
    CHECK(run_cli("converge --config " + cfg + " --out " + out1 + " --eps-list " + eps) == 0);
    CHECK(fs::exists(out1 + "/sweep.csv"));

    std::string header;
    auto rows = read_csv(out1 + "/sweep.csv", &header);
    CHECK(header == "eps_hi,eps_lo,gap,D,max_h1_hi,max_abs_entropy_hi");
    CHECK(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][3] < rows[i - 1][3]);

    // Reruns with the same seed produce byte-identical reports.
    CHECK(run_cli("converge --config " + cfg + " --out " + out2 + " --eps-list " + eps) == 0);
    CHECK(read_file(out1 + "/sweep.csv") == read_file(out2 + "/sweep.csv"));

    // A degenerate eps list cannot form consecutive pairs.
    CHECK(run_cli("converge --config " + cfg + " --out " + out2 + " --eps-list 0.5") == 2);
    CHECK(run_cli("converge --config " + cfg + " --out " + out2 + " --eps-list 0.5,abc,0.1,0.05") == 2);
}

void test_props() {
    std::string out1 = g_dir + "/props1", out2 = g_dir + "/props2";
    CHECK(run_cli("props --lemma a --samples 20000 --seed 4 --out " + out1) == 0);
    CHECK(fs::exists(out1 + "/scan_a.csv"));
    CHECK(last_stdout().find("violations=0") != std::string::npos);

    CHECK(run_cli("props --lemma a --samples 20000 --seed 4 --out " + out2) == 0);
    CHECK(read_file(out1 + "/scan_a.csv") == read_file(out2 + "/scan_a.csv"));

    CHECK(run_cli("props --lemma zz --samples 100 --out " + out2) == 2);
    CHECK(run_cli("props --samples 100 --out " + out2) == 2);  // --lemma is required
}

void test_norms() {
    grid g = make_grid(1, 32, 8.0);

    field zero(g);
    std::string zf = g_dir + "/zero.cfld";
    write_field(zero, zf);
    CHECK(run_cli("norms " + zf) == 0);
    {
        std::string outtxt = last_stdout();
        CHECK(outtxt.find("l2 = 0\n") != std::string::npos);
        CHECK(outtxt.find("h1 = 0\n") != std::string::npos);
        CHECK(outtxt.find("orlicz = 0\n") != std::string::npos);
        CHECK(outtxt.find("w = 0\n") != std::string::npos);
        CHECK(outtxt.find("entropyF = 0\n") != std::string::npos);
        CHECK(outtxt.find("energy_lambda1 = 0\n") != std::string::npos);
    }

    field u = make_gaussian(g, 1.25, 1.5);
    std::string uf = g_dir + "/gauss.cfld";
    write_field(u, uf);
    CHECK(run_cli("norms " + uf) == 0);
    {
        std::string outtxt = last_stdout();
        char buf[256];
        std::snprintf(buf, sizeof buf, "l2 = %.17g\n", l2_norm(u));
        CHECK(outtxt.find(buf) != std::string::npos);
        std::snprintf(buf, sizeof buf, "h1 = %.17g\n", h1_norm(u));
        CHECK(outtxt.find(buf) != std::string::npos);
        std::snprintf(buf, sizeof buf, "orlicz = %.17g\n", luxembourg_norm(u));
        CHECK(outtxt.find(buf) != std::string::npos);
        std::snprintf(buf, sizeof buf, "w = %.17g\n", w_norm(u));
        CHECK(outtxt.find(buf) != std::string::npos);
        std::snprintf(buf, sizeof buf, "entropyF = %.17g\n", entropy_F(u));
        CHECK(outtxt.find(buf) != std::string::npos);
        std::snprintf(buf, sizeof buf, "energy_lambda1 = %.17g\n", energy(u, 1.0));
        CHECK(outtxt.find(buf) != std::string::npos);
    }

    // Truncated field files are I/O errors.
    std::string all = read_file(uf);
    write_text(g_dir + "/trunc.cfld", all.substr(0, all.size() / 2));
    CHECK(run_cli("norms " + g_dir + "/trunc.cfld") == 2);
    CHECK(run_cli("norms " + g_dir + "/no_such.cfld") == 2);
}

void test_noise() {
    // Zero-mass measure: the path file holds a header and no events.
    std::string quiet_cfg = g_dir + "/noise_none.cfg";
    write_text(quiet_cfg, "[channels]\nm = 1\n[noise]\nkind = none\n[time]\nT = 1\n[run]\nseed = 2\n");
    std::string out = g_dir + "/noise_out";
    CHECK(run_cli("noise --config " + quiet_cfg + " --out " + out) == 0);
    {
        std::string body = read_file(out + "/path.npath");
        CHECK(body.substr(0, 6) == "NPATH1");
        CHECK(std::count(body.begin(), body.end(), '\n') == 1);
    }

    std::string cfg = g_dir + "/noise.cfg";
    write_text(cfg,
               "[channels]\nm = 1\n[noise]\nkind = atomic\natoms = 0.5 2 ; -0.4 3\n"
               "[time]\nT = 1\n[run]\nseed = 11\nensemble = 200\n");
    std::string out1 = g_dir + "/noise1", out2 = g_dir + "/noise2";
    CHECK(run_cli("noise --config " + cfg + " --out " + out1) == 0);
    CHECK(last_stdout().find("mean count") != std::string::npos);
    CHECK(run_cli("noise --config " + cfg + " --out " + out2) == 0);
    CHECK(read_file(out1 + "/path.npath") == read_file(out2 + "/path.npath"));

    // A different seed changes the file.
    CHECK(run_cli("noise --config " + cfg + " --seed 999 --out " + out2) == 0);
    CHECK(read_file(out1 + "/path.npath") != read_file(out2 + "/path.npath"));
}

void test_usage() {
    CHECK(run_cli("--help") == 0);
    CHECK(last_stdout().find("simulate") != std::string::npos);
    CHECK(run_cli("") == 2);           // a subcommand is required
    CHECK(run_cli("frobnicate") == 2);  // unknown subcommand
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_tests <path-to-slogse-binary>\n");
        return 2;
    }
    g_cli = argv[1];
    g_dir = "/tmp/slogse_cli_tests";
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);

    test_simulate();
    test_simulate_numeric_abort();
    test_converge();
    test_props();
    test_norms();
    test_noise();
    test_usage();

    if (failures == 0) {
        std::printf("cli_tests: all checks passed\n");
        return 0;
    }
    std::fprintf(stderr, "cli_tests: %d check(s) failed\n", failures);
    return 1;
}
