#include "pdren/mapdyn.hpp"

#include <cmath>
#include <random>

namespace pdren {

TwistMap::TwistMap(const GenFunction& s)
    : gen_(s), p_(s.poly()), p1_(partial(s.poly(), 1)), p2_(partial(s.poly(), 2)) {}

double TwistMap::s(double x, double y) const { return eval(p_, x, y); }
double TwistMap::s1(double x, double y) const { return eval(p1_, x, y); }
double TwistMap::s2(double x, double y) const { return eval(p2_, x, y); }

double TwistMap::solve_y(double x, double u) const {
    double y = x;
    double g = u + s(y, x);
    for (int it = 0; it < 60; ++it) {
        if (std::abs(g) <= 1e-13) return y;
        const double d = s1(y, x);
        if (!(std::abs(d) > kTauSing)) break;
        double step = g / d;
        // halve until the residual decreases
        for (int k = 0; k < 30; ++k) {
            const double yn = y - step;
            const double gn = u + s(yn, x);
            if (std::abs(gn) < std::abs(g)) {
                y = yn;
                g = gn;
                break;
            }
            step *= 0.5;
            if (k == 29) throw Error(Errc::ImplicitSolveFailure, "damped Newton made no progress");
        }
    }
    if (std::abs(g) <= 1e-13) return y;
    throw Error(Errc::ImplicitSolveFailure, "no solution of u + s(y,x) = 0 at x = " + std::to_string(x));
}

MapPoint map_apply(const TwistMap& m, double x, double u) {
    const double y = m.solve_y(x, u);
    return {y, m.s(x, y)};
}

Eigen::Matrix2d map_derivative(const TwistMap& m, double x, double u) {
    const double y = m.solve_y(x, u);
    const double a = m.s1(y, x);
    if (!(std::abs(a) > kTauSing)) throw Error(Errc::TwistViolation, "s_1(y,x) vanishes");
    const double b = m.s2(y, x);
    const double c = m.s1(x, y), d = m.s2(x, y);
    Eigen::Matrix2d J;
    J << -b / a, -1.0 / a, c - d * b / a, -d / a;
    return J;
}

double reversibility_residual(const TwistMap& m, double x, double u) {
    const MapPoint p = map_apply(m, x, u);
    const MapPoint q = map_apply(m, p.x, -p.u);
    return std::hypot(q.x - x, q.u + u);
}

double symplectic_defect(const TwistMap& m, double x, double u) {
    return std::abs(map_derivative(m, x, u).determinant() - 1.0);
}

MapCheck map_check(const TwistMap& m, int n_points, std::uint64_t seed, double box) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-box, box);
    MapCheck out;
    const double h = 1e-6;
    for (int k = 0; k < n_points; ++k) {
        // (x, y) drawn in the box; u follows from the generating function
        const double x = dist(rng), y = dist(rng);
        const double u = -m.s(y, x);
        try {
            out.max_reversibility = std::max(out.max_reversibility, reversibility_residual(m, x, u));
            const Eigen::Matrix2d J = map_derivative(m, x, u);
            out.max_det_defect = std::max(out.max_det_defect, std::abs(J.determinant() - 1.0));
            const MapPoint px = map_apply(m, x + h, u), mx = map_apply(m, x - h, u);
            const MapPoint pu = map_apply(m, x, u + h), mu = map_apply(m, x, u - h);
            Eigen::Matrix2d fd;
            fd << (px.x - mx.x) / (2 * h), (pu.x - mu.x) / (2 * h), (px.u - mx.u) / (2 * h), (pu.u - mu.u) / (2 * h);
            out.max_fd_mismatch = std::max(out.max_fd_mismatch, (fd - J).cwiseAbs().maxCoeff());
            ++out.points;
        } catch (const Error& e) {
            if (e.code() != Errc::ImplicitSolveFailure && e.code() != Errc::TwistViolation) throw;
            ++out.skipped;
        }
    }
    return out;
}

std::pair<double, double> map_scalings(const TwistMap& m) {
    const MapPoint p1 = map_apply(m, 0.0, 0.0);
    const MapPoint p2 = map_apply(m, p1.x, p1.u);
    const Eigen::Matrix2d D = map_derivative(m, p1.x, p1.u) * map_derivative(m, 0.0, 0.0);
    const double lambda = p2.x;
    return {lambda, -lambda / D(0, 1)};
}

}  // namespace pdren
