#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pdren/genfun.hpp"

namespace pdren {

// The reversible twist map (x, -s(y,x)) -> (y, s(x,y)).
class TwistMap {
public:
    explicit TwistMap(const GenFunction& s);

    double s(double x, double y) const;
    double s1(double x, double y) const;
    double s2(double x, double y) const;
    const GenFunction& generating_function() const noexcept { return gen_; }

    // y with u + s(y, x) = 0, damped Newton from y = x.
    double solve_y(double x, double u) const;

private:
    GenFunction gen_;
    Poly2 p_, p1_, p2_;
};

struct MapPoint {
    double x = 0.0, u = 0.0;
};

MapPoint map_apply(const TwistMap& m, double x, double u);
Eigen::Matrix2d map_derivative(const TwistMap& m, double x, double u);

// |F(T(F(p))) - T(p)|, zero for a reversible map with T(x,u) = (x,-u)
double reversibility_residual(const TwistMap& m, double x, double u);
double symplectic_defect(const TwistMap& m, double x, double u);

struct MapCheck {
    int points = 0;
    int skipped = 0;  // points where the implicit solve or the twist failed
    double max_reversibility = 0.0;
    double max_det_defect = 0.0;
    double max_fd_mismatch = 0.0;  // derivative against centered differences
};

MapCheck map_check(const TwistMap& m, int n_points, std::uint64_t seed, double box = 0.6);

// lambda = pi_x F(F(0,0)) and mu = -lambda / d_u pi_x (F o F)(0,0)
std::pair<double, double> map_scalings(const TwistMap& m);

struct CascadeOptions {
    int k_max = 9;
    double a_tol = 1e-12;
    double trace_tol = 1e-9;
};

struct CascadeRecord {
    std::vector<double> a_values;         // a_k, k = 1..
    std::vector<double> trace_residuals;  // |tr + 2| at each a_k
    std::vector<double> delta_estimates;  // (a_{k-1} - a_{k-2}) / (a_k - a_{k-1}), from k = 3
    std::vector<double> alpha_values;     // where the new orbit's trace is 0
    std::vector<double> d_values;         // d_k = |p'_k - p_k|
    std::vector<double> d_ratios;         // d_k / d_{k+1}
    int failed_level = 0;                 // level where the continuation was lost, 0 if none
    std::string error;
};

// An OrbitLost at some level ends the run; the levels before it are kept.
CascadeRecord henon_cascade(const CascadeOptions& opt = {});

// -lim d_k / d_{k+1} by Aitken extrapolation of the last three ratios.
double orbit_scaling(const CascadeRecord& record);

}  // namespace pdren
