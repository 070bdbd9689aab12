#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace pdren {

// Flat key=value settings. Every key has a default.
struct RunConfig {
    double rho = 1.75;
    int deg = 60;
    int N_head = 22;
    std::optional<double> c0;  // empty: taken from s0

    double fixpoint_tol = 1e-14;
    int fixpoint_max_iter = 200;
    double ball = 5.79833984375e-4;
    double rho_ball = 6.0e-12;
    int n_samples = 8;
    double fd_step = 1e-6;
    double eigen_tol = 1e-6;
    int k_max = 9;
    int map_points = 100;
    std::uint64_t seed = 20240611;

    std::string s0_path;      // default: the shipped seed
    std::string s_star_path;  // default: <out>/s_star.txt
    std::string out_dir = "pdren_out";

    bool ekw_mode = false;
    bool fd_oracle = false;

    std::string resolved_s0() const;
    std::string resolved_s_star() const;
};

// Throws ParseError on unknown keys or malformed values and
// InvalidArgument when the result violates the invariants.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
void validate(const RunConfig& cfg);

std::string default_s0_path();

}  // namespace pdren
