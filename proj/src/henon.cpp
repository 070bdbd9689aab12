// Period-doubling cascade of H_a(x,u) = (-u + 1 - a x^2, x). A periodic orbit
// of period n is a cyclic solution of x_{i+1} + x_{i-1} - 1 + a x_i^2 = 0,
// solved by Newton in extended precision.
#include "pdren/mapdyn.hpp"

#include <cmath>
#include <string>

#include <Eigen/Sparse>

namespace pdren {

namespace {

using Real = long double;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

class OrbitSolver {
public:
    explicit OrbitSolver(Eigen::Index n) : n_(n) {}

    Vec residual(const Vec& x, Real a) const {
        Vec r(n_);
        for (Eigen::Index i = 0; i < n_; ++i) r(i) = x(next(i)) + x(prev(i)) - 1 + a * x(i) * x(i);
        return r;
    }

    // Throws OrbitLost when Newton does not settle.
    Vec newton(Vec x, Real a) {
        for (int it = 0; it < 50; ++it) {
            std::vector<Eigen::Triplet<Real>> trip;
            trip.reserve(static_cast<std::size_t>(3 * n_));
            for (Eigen::Index i = 0; i < n_; ++i) {
                trip.emplace_back(i, i, 2 * a * x(i));
                trip.emplace_back(i, next(i), Real{1});
                trip.emplace_back(i, prev(i), Real{1});
            }
            Eigen::SparseMatrix<Real> J(n_, n_);
            J.setFromTriplets(trip.begin(), trip.end());
            lu_.compute(J);
            if (lu_.info() != Eigen::Success) throw Error(Errc::OrbitLost, "singular orbit Jacobian");
            const Vec dx = lu_.solve(residual(x, a));
            x -= dx;
            if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 10) throw Error(Errc::OrbitLost, "orbit escaped");
            if (dx.cwiseAbs().maxCoeff() <= 1e-17L) break;
        }
        if (residual(x, a).cwiseAbs().maxCoeff() > 1e-13L) throw Error(Errc::OrbitLost, "Newton did not converge");
        return x;
    }

private:
    Eigen::Index next(Eigen::Index i) const { return i + 1 == n_ ? 0 : i + 1; }
    Eigen::Index prev(Eigen::Index i) const { return i == 0 ? n_ - 1 : i - 1; }

    Eigen::Index n_;
    Eigen::SparseLU<Eigen::SparseMatrix<Real>> lu_;
};

Eigen::Matrix<Real, 2, 2> monodromy(const Vec& x, Real a) {
    Eigen::Matrix<Real, 2, 2> M = Eigen::Matrix<Real, 2, 2>::Identity();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::Matrix<Real, 2, 2> step;
        step << -2 * a * x(i), -1, 1, 0;
        M = step * M;
    }
    return M;
}

Real trace(const Vec& x, Real a) { return monodromy(x, a).trace(); }

// distance between the two halves of a doubled orbit
Real split(const Vec& x) {
    const Eigen::Index n = x.size() / 2;
    if (n == 0) return 1;
    return (x.head(n) - x.tail(n)).cwiseAbs().maxCoeff();
}

struct Bracket {
    Real lo, hi;
    Vec x_lo;
};

// Follows the orbit from a upward in steps of h until fn changes sign
// (positive to negative). Child orbits are guarded against collapsing
// onto the doubled parent.
template <class Fn>
Bracket march(OrbitSolver& solver, Vec x, Real a, Real h, bool child, Fn fn) {
    Vec xp;
    Real ap = 0;
    bool have_prev = false;
    for (int guard = 0; guard < 100000; ++guard) {
        if (h < 1e-22L) throw Error(Errc::OrbitLost, "continuation step underflow");
        const Real an = a + h;
        Vec guess = have_prev ? Vec(x + (x - xp) * (h / (a - ap))) : x;
        Vec xn;
        try {
            xn = solver.newton(guess, an);
            if (child && split(xn) < split(x) / 2) throw Error(Errc::OrbitLost, "collapsed");
        } catch (const Error&) {
            h /= 2;
            continue;
        }
        if (fn(xn, an) < 0) return {a, an, x};
        xp = x;
        ap = a;
        have_prev = true;
        x = std::move(xn);
        a = an;
    }
    throw Error(Errc::OrbitLost, "continuation did not reach the crossing");
}

template <class Fn>
std::pair<Real, Vec> bisect(OrbitSolver& solver, Bracket b, Fn fn, Real a_tol, Real f_tol) {
    Vec x = b.x_lo;
    for (int it = 0; it < 400; ++it) {
        const Real m = (b.lo + b.hi) / 2;
        const Vec xm = solver.newton(x, m);
        const Real f = fn(xm, m);
        if (f < 0) {
            b.hi = m;
        } else {
            b.lo = m;
            x = xm;
        }
        if (b.hi - b.lo <= a_tol && std::abs(f) <= f_tol) return {m, xm};
        if (b.hi - b.lo <= 1e-30L) break;
    }
    const Real m = (b.lo + b.hi) / 2;
    return {m, solver.newton(x, m)};
}

// Period-doubled orbit just past the bifurcation at a_k.
Vec branch(const Vec& xk, Real ak, Real eps, OrbitSolver& solver2) {
    const Eigen::Index n = xk.size();
    const Eigen::Matrix<Real, 2, 2> N = monodromy(xk, ak) + Eigen::Matrix<Real, 2, 2>::Identity();
    // N is nilpotent at the crossing; a nonzero column spans the -1 eigenvector
    Eigen::Matrix<Real, 2, 1> w = N.col(0).norm() >= N.col(1).norm() ? N.col(0) : N.col(1);
    if (w.norm() == 0) w << 1, 0;
    Vec v(2 * n);
    Real cur = w(0), prv = w(1);
    for (Eigen::Index i = 0; i < 2 * n; ++i) {
        v(i) = cur;
        const Real nxt = -2 * ak * xk(i % n) * cur - prv;
        prv = cur;
        cur = nxt;
    }
    v /= v.cwiseAbs().maxCoeff();
    Vec xd(2 * n);
    xd << xk, xk;
    for (Real amp : {0.5L, 1.5L, 0.15L, 5.0L}) {
        try {
            Vec xc = solver2.newton(xd + amp * std::sqrt(eps) * v, ak + eps);
            if (split(xc) > 1e-3L * std::sqrt(eps)) return xc;
        } catch (const Error&) {
        }
    }
    throw Error(Errc::OrbitLost, "period-doubled branch not found");
}

}  // namespace

CascadeRecord henon_cascade(const CascadeOptions& opt) {
    if (opt.k_max < 1) throw Error(Errc::InvalidArgument, "k_max must be positive");
    if (opt.k_max > 14) throw Error(Errc::InvalidArgument, "k_max beyond 14 exceeds the working precision");
    CascadeRecord rec;
    Real a = 2;
    Vec x(1);
    x(0) = (-1 + std::sqrt(1 + a)) / a;
    Real L = 1;  // expected distance to the next bifurcation
    const auto tr2 = [](const Vec& y, Real q) { return trace(y, q) + 2; };
    const auto tr0 = [](const Vec& y, Real q) { return trace(y, q); };

    for (int k = 1; k <= opt.k_max; ++k) try {
        const Eigen::Index n = x.size();
        OrbitSolver solver(n), solver2(2 * n);
        const Bracket br = march(solver, x, a, L / 40, k > 1, tr2);
        const auto [ak, xk] = bisect(solver, br, tr2, opt.a_tol, opt.trace_tol / 10);
        rec.a_values.push_back(static_cast<double>(ak));
        rec.trace_residuals.push_back(static_cast<double>(std::abs(tr2(xk, ak))));
        const std::size_t m = rec.a_values.size();
        if (m >= 3) {
            rec.delta_estimates.push_back((rec.a_values[m - 2] - rec.a_values[m - 3]) /
                                          (rec.a_values[m - 1] - rec.a_values[m - 2]));
        }

        const Real L_next = m >= 2 ? Real(rec.a_values[m - 1] - rec.a_values[m - 2]) / 8.72L : Real(1);
        const Real eps = L_next * 1e-4L;
        Vec xc = branch(xk, ak, eps, solver2);

        // orbit geometry where the new orbit has rotation number 1/4
        const Bracket bc = march(solver2, xc, ak + eps, L_next / 40, true, tr0);
        const auto [alpha, xa] = bisect(solver2, bc, tr0, opt.a_tol, Real(1e-9));
        const Vec parent = solver.newton(xk, alpha);
        Real d = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Real pu = parent((i + n - 1) % n);
            const Real c1 = std::hypot(xa(i) - parent(i), xa((i + 2 * n - 1) % (2 * n)) - pu);
            const Real c2 = std::hypot(xa(i + n) - parent(i), xa(i + n - 1) - pu);
            d = std::max(d, std::max(c1, c2));
        }
        rec.alpha_values.push_back(static_cast<double>(alpha));
        rec.d_values.push_back(static_cast<double>(d));
        if (rec.d_values.size() >= 2) {
            const std::size_t q = rec.d_values.size();
            rec.d_ratios.push_back(rec.d_values[q - 2] / rec.d_values[q - 1]);
        }

        x = xa;
        a = alpha;
        L = L_next;
    } catch (const Error& e) {
        if (e.code() != Errc::OrbitLost) throw;
        rec.failed_level = k;
        rec.error = e.what();
        break;
    }
    return rec;
}

double orbit_scaling(const CascadeRecord& record) {
    if (record.d_values.size() < 4) {
        throw Error(Errc::InsufficientData, "orbit scaling needs at least 4 levels, have " +
                                                std::to_string(record.d_values.size()));
    }
    const auto& r = record.d_ratios;
    const std::size_t m = r.size();
    const double d1 = r[m - 2] - r[m - 3], d2 = r[m - 1] - r[m - 2];
    const double den = d2 - d1;
    double lim = r[m - 1];
    if (std::abs(den) > 1e-14 * std::abs(lim)) lim = r[m - 1] - d2 * d2 / den;
    return -lim;
}

}  // namespace pdren
