#pragma once

// Flat "key = value" config files with [section] headers, '#' comments, and
// fail-closed key handling: every key must be consumed by the loading
// command, unknown or misspelled keys abort with their line numbers.

#include <cctype>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "grid.hpp"
#include "levy.hpp"
#include "nonlinearity.hpp"
#include "solver.hpp"

namespace slogse {

namespace detail {
inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}
}  // namespace detail

class config_map {
  public:
    static config_map parse_file(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw io_error("cannot open config file: " + path);
        config_map cm;
        cm.path_ = path;
        std::string line, section;
        int lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw config_error(cm.where(lineno) + "malformed section header: " + line);
                section = detail::trim(line.substr(1, line.size() - 2));
                require(!section.empty(), cm.where(lineno) + "empty section name");
                continue;
            }
            std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error(cm.where(lineno) + "expected 'key = value': " + line);
            std::string key = detail::trim(line.substr(0, eq));
            std::string val = detail::trim(line.substr(eq + 1));
            require(!key.empty(), cm.where(lineno) + "empty key");
            std::string full = section.empty() ? key : section + "." + key;
            if (cm.kv_.count(full))
                throw config_error(cm.where(lineno) + "duplicate key: " + full);
            cm.kv_[full] = val;
            cm.lines_[full] = lineno;
        }
        return cm;
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw config_error(path_ + ": missing required key: " + key);
        consumed_.insert(key);
        return it->second;
    }
    std::string get_string(const std::string& key, const std::string& dflt) {
        return has(key) ? get_string(key) : dflt;
    }

    double get_double(const std::string& key) { return parse_double(key, get_string(key)); }
    double get_double(const std::string& key, double dflt) {
        return has(key) ? get_double(key) : dflt;
    }

    long long get_int(const std::string& key) {
        std::string s = get_string(key);
        char* end = nullptr;
        long long v = std::strtoll(s.c_str(), &end, 10);
        if (end == s.c_str() || *end != '\0')
            throw config_error(where_key(key) + "expected an integer for " + key + ": '" + s + "'");
        return v;
    }
    long long get_int(const std::string& key, long long dflt) {
        return has(key) ? get_int(key) : dflt;
    }

    std::uint64_t get_u64(const std::string& key) {
        std::string s = get_string(key);
        char* end = nullptr;
        unsigned long long v = std::strtoull(s.c_str(), &end, 10);
        if (end == s.c_str() || *end != '\0')
            throw config_error(where_key(key) + "expected an unsigned integer for " + key + ": '" + s + "'");
        return v;
    }
    std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) {
        return has(key) ? get_u64(key) : dflt;
    }

    bool get_bool(const std::string& key, bool dflt) {
        if (!has(key)) return dflt;
        std::string s = get_string(key);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw config_error(where_key(key) + "expected a boolean for " + key + ": '" + s + "'");
    }

    // Whitespace-separated doubles.
    std::vector<double> get_doubles(const std::string& key) {
        std::istringstream ss(get_string(key));
        std::vector<double> out;
        std::string tok;
        while (ss >> tok) out.push_back(parse_double(key, tok));
        require(!out.empty(), where_key(key) + "expected numbers for " + key);
        return out;
    }

    // Fail-closed check: every key present in the file must have been read.
    void finish() const {
        std::string stray;
        for (const auto& [k, v] : kv_)
            if (!consumed_.count(k)) stray += (stray.empty() ? "" : ", ") + k;
        if (!stray.empty())
            throw config_error(path_ + ": unknown config keys (unused by this command): " + stray);
    }

    const std::string& path() const { return path_; }

  private:
    std::string where(int lineno) const { return path_ + ":" + std::to_string(lineno) + ": "; }
    std::string where_key(const std::string& key) const {
        auto it = lines_.find(key);
        return it == lines_.end() ? path_ + ": " : where(it->second);
    }
    double parse_double(const std::string& key, const std::string& s) {
        char* end = nullptr;
        double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0')
            throw config_error(where_key(key) + "expected a number for " + key + ": '" + s + "'");
        return v;
    }

    std::string path_ = "<config>";
    std::map<std::string, std::string> kv_;
    std::map<std::string, int> lines_;
    std::set<std::string> consumed_;
};

// --- section loaders ----------------------------------------------------------

inline grid load_grid(config_map& cm) {
    int d = static_cast<int>(cm.get_int("grid.d", 1));
    int n = static_cast<int>(cm.get_int("grid.n", 256));
    double ell = cm.get_double("grid.ell", 16.0);
    return make_grid(d, n, ell);
}

inline noise_channel_set load_channels(config_map& cm) {
    noise_channel_set ch;
    int m = static_cast<int>(cm.get_int("channels.m", 1));
    require(m >= 1 && m <= 64, "channels.m must lie in [1, 64]");
    for (int j = 1; j <= m; ++j) {
        std::string suffix = "_" + std::to_string(j);
        saturated_nonlinearity s;
        s.family = family_from_string(
            cm.get_string("channels.family" + suffix, "photorefractive"));
        if (s.family == channel_family::constant)
            s.cval = cm.get_double("channels.cval" + suffix, 1.0);
        else
            s.rho = cm.get_double("channels.rho" + suffix, 1.0);
        ch.channels.push_back(s);
    }
    validate_channels(ch);
    return ch;
}

// [noise] kind = atomic | radial_power | none.  Atomic atoms are listed as
// "z_1 .. z_m w" groups separated by ';' in a single `atoms` value.
inline levy_measure_spec load_measure(config_map& cm, int m_channels) {
    levy_measure_spec spec;
    std::string kind = cm.get_string("noise.kind", "none");
    if (kind == "none") {
        spec.kind = levy_measure_spec::kind_t::atomic;
        spec.m = m_channels;
        return spec;  // no atoms: zero mass, silent noise
    }
    if (kind == "atomic") {
        spec.kind = levy_measure_spec::kind_t::atomic;
        spec.m = m_channels;
        std::string atoms = cm.get_string("noise.atoms");
        for (const auto& groupstr : split(atoms, ';')) {
            std::string gs = detail::trim(groupstr);
            if (gs.empty()) continue;
            std::istringstream ss(gs);
            std::vector<double> nums;
            double x;
            while (ss >> x) nums.push_back(x);
            require(static_cast<int>(nums.size()) == m_channels + 1,
                    "noise.atoms: each ';' group needs m mark components plus a weight");
            std::vector<double> z(nums.begin(), nums.end() - 1);
            spec.atoms.emplace_back(std::move(z), nums.back());
        }
        require(!spec.atoms.empty(), "noise.atoms: no atoms given (use kind = none for silence)");
    } else if (kind == "radial_power") {
        spec.kind = levy_measure_spec::kind_t::radial_power;
        spec.m = m_channels;
        spec.alpha = cm.get_double("noise.alpha", 0.5);
        spec.c = cm.get_double("noise.c", 1.0);
        spec.delta_cut = cm.get_double("noise.delta_cut", 0.01);
    } else {
        throw config_error("noise.kind must be atomic, radial_power or none, got '" + kind + "'");
    }
    validate_measure(spec);
    return spec;
}

inline field load_initial_data(config_map& cm, const grid& g) {
    std::string kind = cm.get_string("init.kind", "gaussian");
    if (kind == "file") {
        field u = read_field(cm.get_string("init.file"));
        require(u.g.same_as(g), "init.file: field grid does not match [grid] section");
        return u;
    }
    double A = cm.get_double("init.amplitude", 1.0);
    double w = cm.get_double("init.width", g.ell / 16.0);
    if (kind == "gaussian") return make_gaussian(g, A, w);
    if (kind == "sech") return make_sech(g, A, w);
    if (kind == "plane_bump") return make_plane_bump(g, A, w, cm.get_double("init.kmod", 1.0));
    throw config_error("init.kind must be gaussian, sech, plane_bump or file, got '" + kind + "'");
}

struct sim_setup {
    solver_config cfg;
    levy_measure_spec measure;
    field u0;
    std::uint64_t seed = 0;
    int ebal_k = 10;
    bool write_states = false;
    int ensemble = 1;
};

inline sim_setup load_sim_setup(config_map& cm) {
    sim_setup s;
    s.cfg.g = load_grid(cm);
    s.cfg.eps = eps_param(cm.get_double("model.eps"));  // required: no silent default
    s.cfg.lambda = cm.get_double("model.lambda", 1.0);
    s.cfg.dt = cm.get_double("time.dt", 1e-3);
    s.cfg.T = cm.get_double("time.T", 1.0);
    int sample_count = static_cast<int>(cm.get_int("time.sample_count", 101));
    s.cfg.sample_times = uniform_sample_times(s.cfg.T, sample_count);
    s.cfg.channels = load_channels(cm);
    s.cfg.dispersion_off = cm.get_bool("run.dispersion_off", false);
    s.measure = load_measure(cm, s.cfg.channels.m());
    s.u0 = load_initial_data(cm, s.cfg.g);
    s.seed = cm.get_u64("run.seed", 42);
    s.ebal_k = static_cast<int>(cm.get_int("run.ebal_k", 10));
    require(s.ebal_k >= 2, "run.ebal_k must be an integer >= 2");
    s.write_states = cm.get_bool("run.write_states", false);
    s.ensemble = static_cast<int>(cm.get_int("run.ensemble", 1));
    require(s.ensemble >= 1, "run.ensemble must be >= 1");
    return s;
}

// Provenance note written next to every command's outputs.  The timestamp is
// informational; the data files themselves are byte-identical across reruns.
inline void write_manifest(const std::string& dir, const std::string& command,
                           const std::string& config_path, std::uint64_t seed,
                           const std::string& extra = "") {
    std::ofstream f(dir + "/manifest.txt", std::ios::binary);
    if (!f) throw io_error("cannot write manifest in " + dir);
    f << "tool = slogse 1.0.0\n";
    f << "command = " << command << "\n";
    f << "config = " << config_path << "\n";
    f << "seed = " << seed << "\n";
    std::time_t now = std::time(nullptr);
    char buf[64];
    if (std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now)))
        f << "written = " << buf << "\n";
    if (!extra.empty()) f << extra;
    if (!f.good()) throw io_error("short write: " + dir + "/manifest.txt");
}

}  // namespace slogse
