#include "pdren/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pdren/error.hpp"

namespace pdren {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw Error(Errc::ParseError, "config key '" + key + "': not a number: " + v);
}

long long to_int(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw Error(Errc::ParseError, "config key '" + key + "': not an integer: " + v);
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(Errc::ParseError, "config key '" + key + "': not a boolean: " + v);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"rho", [](RunConfig& c, const std::string& k, const std::string& v) { c.rho = to_double(k, v); }},
        {"deg", [](RunConfig& c, const std::string& k, const std::string& v) { c.deg = static_cast<int>(to_int(k, v)); }},
        {"head", [](RunConfig& c, const std::string& k, const std::string& v) { c.N_head = static_cast<int>(to_int(k, v)); }},
        {"c0", [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "from_s0") c.c0.reset();
             else c.c0 = to_double(k, v);
         }},
        {"tol.fixpoint", [](RunConfig& c, const std::string& k, const std::string& v) { c.fixpoint_tol = to_double(k, v); }},
        {"fixpoint.max_iter", [](RunConfig& c, const std::string& k, const std::string& v) { c.fixpoint_max_iter = static_cast<int>(to_int(k, v)); }},
        {"fixpoint.ball", [](RunConfig& c, const std::string& k, const std::string& v) { c.ball = to_double(k, v); }},
        {"certificate.rho_ball", [](RunConfig& c, const std::string& k, const std::string& v) { c.rho_ball = to_double(k, v); }},
        {"certificate.samples", [](RunConfig& c, const std::string& k, const std::string& v) { c.n_samples = static_cast<int>(to_int(k, v)); }},
        {"tol.fd_step", [](RunConfig& c, const std::string& k, const std::string& v) { c.fd_step = to_double(k, v); }},
        {"tol.eigen", [](RunConfig& c, const std::string& k, const std::string& v) { c.eigen_tol = to_double(k, v); }},
        {"cascade.k_max", [](RunConfig& c, const std::string& k, const std::string& v) { c.k_max = static_cast<int>(to_int(k, v)); }},
        {"mapcheck.points", [](RunConfig& c, const std::string& k, const std::string& v) { c.map_points = static_cast<int>(to_int(k, v)); }},
        {"seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_int(k, v)); }},
        {"s0", [](RunConfig& c, const std::string&, const std::string& v) { c.s0_path = v; }},
        {"s_star", [](RunConfig& c, const std::string&, const std::string& v) { c.s_star_path = v; }},
        {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
        {"ekw_mode", [](RunConfig& c, const std::string& k, const std::string& v) { c.ekw_mode = to_bool(k, v); }},
        {"fd_oracle", [](RunConfig& c, const std::string& k, const std::string& v) { c.fd_oracle = to_bool(k, v); }},
    };
    return table;
}

}  // namespace

std::string default_s0_path() { return std::string(PDREN_DATA_DIR) + "/s0.txt"; }

std::string RunConfig::resolved_s0() const { return s0_path.empty() ? default_s0_path() : s0_path; }

std::string RunConfig::resolved_s_star() const {
    return s_star_path.empty() ? out_dir + "/s_star.txt" : s_star_path;
}

void validate(const RunConfig& c) {
    auto bad = [](const std::string& what) { throw Error(Errc::InvalidArgument, "config: " + what); };
    if (!(c.rho > 0.0)) bad("rho must be positive");
    if (c.deg < 4) bad("deg must be at least 4");
    if (c.N_head < 1 || c.N_head > c.deg) bad("head must lie in [1, deg]");
    for (double t : {c.fixpoint_tol, c.ball, c.rho_ball, c.fd_step, c.eigen_tol}) {
        if (!(t > 0.0)) bad("tolerances must be positive");
    }
    if (c.fixpoint_max_iter < 1 || c.n_samples < 0 || c.k_max < 1 || c.map_points < 1) bad("counts must be positive");
}

RunConfig parse_config(const std::string& text, RunConfig cfg) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(Errc::ParseError, "config line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw Error(Errc::ParseError, "config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (value.empty()) throw Error(Errc::ParseError, "config line " + std::to_string(lineno) + ": empty value");
        it->second(cfg, key, value);
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream f(path);
    if (!f) throw Error(Errc::ParseError, "cannot open config file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

}  // namespace pdren
