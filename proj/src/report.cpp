#include "pdren/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "pdren/error.hpp"

namespace pdren {

namespace {

constexpr double kLambdaStarMid = -0.2488752887185522;

}  // namespace

const std::vector<ConstantInterval>& constants_table() {
    static const std::vector<ConstantInterval> table = {
        {"lambda_star", -0.248875288734817765, -0.248875288702286711, "x scaling at the fixed point"},
        {"mu_star", 0.0611101382055370338, 0.0611101382190655586, "u scaling at the fixed point"},
        {"t_shift_abs", 0.0, 7.89560771750566329e-12, "|t_c0| at the fixed point"},
        {"fixed_point_distance", 0.0, 1.1e-10, "|s* - s0| in the weighted norm"},
        {"epsilon_residual", 0.0, 1e-13, "|R_c0[s] - s| at the converged point"},
        {"contraction_D", 0.0, 0.1258544921875, "estimated norm of the deflated derivative"},
        {"delta1", 8.72021484375, 8.72216796875, "leading expanding eigenvalue"},
        {"delta2_minus_inv_lambda", 0.0, 1e-6, "|delta2 - 1/lambda|"},
        {"stable_radius", 0.0, 0.1258544921875, "|kappa3| plus the tail-column estimate"},
        {"head_growth_drift", 0.0, 1e-6, "change of delta1, delta2, stable radius for head 22 -> 26"},
        {"ekw_lambda_distance", 0.0, 1e-6, "distance of the closest unshifted eigenvalue to lambda"},
        {"shifted_null_eigenvalue", 0.0, 1e-6, "|eigenvalue| carried by psi_EKW in the shifted operator"},
        {"shifted_null_eigvec_distance", 0.0, 1e-5, "l1 distance between that eigenvector and psi_EKW"},
        {"shifted_lambda_gap", 1e-6, 1e300, "distance of every shifted eigenvalue from lambda"},
        {"alpha", 1.0, 60.0, "norm equivalence constant"},
        {"eig_residual", 0.0, 1e-10, "|DA - A Lambda| / |D|"},
        {"inverse_D", 0.0, 1.0 - 1e-12, "|I - A B0| for the eigenvector matrix"},
        {"inverse_delta_over_oracle", 0.1, 10.0, "delta divided by |A^-1 - B0| from an extended precision inverse"},
        {"norm_P2_L_e1", 0.0, 5.19007444381714e-3, "ten times the tabulated bound"},
        {"norm_P1_L_e2", 0.0, 1.76560133695602e-3, "ten times the tabulated bound"},
        {"norm_Prest_L_e1", 0.0, 3.5819411277771e-2, "ten times the tabulated bound"},
        {"norm_Prest_L_e2", 0.0, 1.49521231651306e-2, "ten times the tabulated bound"},
        {"norm_P1_L_Prest", 0.0, 1.22539699077606e-3, "ten times the tabulated bound"},
        {"norm_P2_L_Prest", 0.0, 8.23289155960083e-4, "ten times the tabulated bound"},
        {"eigencheck_frozen_psi", 0.0, 1e-6, "relative residual of D R_* psi = lambda psi"},
        {"eigencheck_ekw_psi", 0.0, 1e-6, "relative residual of D R_EKW psi_EKW = lambda psi_EKW"},
        {"eigencheck_shifted_null", 0.0, 1e-6, "relative size of D R_c0 psi_EKW"},
        {"henon_a1", 3.0 - 1e-9, 3.0 + 1e-9, "first period doubling"},
        {"henon_a2", 4.0 - 1e-9, 4.0 + 1e-9, "second period doubling"},
        {"henon_trace_residual", 0.0, 1e-9, "|tr + 2| at each located a_k"},
        {"feigenbaum_delta", 8.721 * 0.99, 8.721 * 1.01, "accumulation rate of a_k"},
        {"orbit_scaling_abs", 0.98 / -kLambdaStarMid, 1.02 / -kLambdaStarMid, "|lim d_k / d_k+1| against 1/|lambda|"},
        {"map_lambda_mismatch", 0.0, 1e-9, "|pi_x F(F(0,0)) - lambda|"},
        {"map_mu_mismatch", 0.0, 1e-9, "|-lambda / d_u pi_x F(F(0,0)) - mu|"},
        {"reversibility", 0.0, 1e-10, "max |F T F (p) - T p|"},
        {"symplecticity", 0.0, 1e-10, "max |det DF - 1|"},
        {"derivative_fd_mismatch", 0.0, 1e-7, "max |DF - centered differences|"},
    };
    return table;
}

const ConstantInterval& constant(const std::string& name) {
    for (const auto& c : constants_table())
        if (name == c.name) return c;
    throw Error(Errc::InvalidArgument, "unknown constant " + name);
}

bool Report::check(const std::string& name, double value) {
    const ConstantInterval& c = constant(name);
    ConstantCheck r{name, value, c.lo, c.hi, std::isfinite(value) && value >= c.lo && value <= c.hi};
    checks.push_back(r);
    return r.pass;
}

bool Report::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

Json Report::to_json(bool with_timestamp) const {
    Json j;
    j["command"] = command;
    if (with_timestamp) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        j["timestamp"] = buf;
    }
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    Json arr = Json::array();
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name}, {"computed", c.value}, {"interval", {c.lo, c.hi}}, {"pass", c.pass}});
    }
    j["constants_compared"] = arr;
    return j;
}

std::string file_digest(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::ParseError, "cannot open " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::istreambuf_iterator<char> it(f), end; it != end; ++it) {
        h ^= static_cast<unsigned char>(*it);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    const std::string tmp = path + ".partial";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(Errc::InvalidArgument, "cannot write " + tmp);
        f << content;
        if (!f) throw Error(Errc::InvalidArgument, "write failed for " + tmp);
    }
    std::filesystem::rename(tmp, p);
}

std::string format_csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_csv_number(r[i]);
        out += '\n';
    }
    return out;
}

}  // namespace pdren
