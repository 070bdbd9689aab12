#include "pdren/genfun.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pdren {

namespace {

double coef_norm(const Poly2& a) { return norm_rho(a.without_tail()); }

// Row Q(u, 0) as a univariate polynomial; value and first two derivatives.
struct RowValue {
    double f, f1, f2;
};

RowValue eval_row(const Poly2& Q, double u) {
    double f = 0.0, f1 = 0.0, f2 = 0.0;
    for (int i = Q.degree(); i >= 0; --i) {
        f2 = f2 * u + 2.0 * f1;
        f1 = f1 * u + f;
        f = f * u + Q.get(i, 0);
    }
    return {f, f1, f2};
}

Poly2 project_output(const Poly2& R, double* drift_rel) {
    const auto sym = symmetrize(R);
    const double base = std::max(coef_norm(R), 1e-300);
    const double rel = sym.drift / base;
    if (drift_rel != nullptr) *drift_rel = rel;
    if (rel > kSymDriftMax) {
        throw Error(Errc::NotSymmetric, "renormalized series drifted off the symmetric space by " + std::to_string(rel));
    }
    return sym.poly;
}

std::vector<double> xi_coeffs(double t) { return {0.0, 1.0, t}; }

RenormOutcome renorm_from(const GenFunction& s, const MidpointSolution& mid, const RenormSpec& spec) {
    RenormOutcome out;
    out.Z = mid.Z;
    out.midpoint_residual = mid.residual;
    out.P = prerenorm(s, mid);
    const double rho = s.rho();
    if (spec.mode == RenormMode::Frozen) {
        if (spec.mu_star == 0.0) throw Error(Errc::SingularDenominator, "frozen mu is zero");
        out.lambda = spec.lambda_star;
        out.mu = spec.mu_star;
        out.Q = out.P;
        const Poly2 R = scale(scale_args(out.P, spec.lambda_star, rho), 1.0 / spec.mu_star);
        out.s_out = GenFunction::unchecked(project_output(R, &out.symmetry_drift));
        return out;
    }
    if (spec.mode == RenormMode::Shifted) {
        out.t = t_shift(out.P, spec.c);
        if (!(2.0 * std::abs(out.t) * rho < 1.0)) {
            throw Error(Errc::DomainEscape, "shift parameter too large: t = " + std::to_string(out.t));
        }
        out.Q = shifted_prerenorm(out.P, out.t, shifted_radius(rho));
    } else {
        out.Q = out.P;
    }
    out.lambda = scaling_lambda(out.Q);
    out.mu = scaling_mu(out.Q, out.lambda);
    if (std::abs(out.mu) <= kTauSing) throw Error(Errc::SingularDenominator, "mu vanishes");
    const Poly2 R = scale(scale_args(out.Q, out.lambda, rho), 1.0 / out.mu);
    out.s_out = GenFunction(project_output(R, &out.symmetry_drift), true);
    return out;
}

}  // namespace

GenFunction::GenFunction(Poly2 p, bool check) : poly_(std::move(p)), symmetric_(check) {
    if (check && !is_symmetric(poly_)) {
        throw Error(Errc::NotSymmetric, "symmetry defect " + std::to_string(symmetry_defect(poly_)));
    }
}

GenFunction GenFunction::unchecked(Poly2 p) {
    GenFunction g;
    g.poly_ = std::move(p);
    g.symmetric_ = false;
    return g;
}

MidpointSolution solve_midpoint(const GenFunction& s, const MidpointOptions& opt) {
    const Poly2& sp = s.poly();
    const int D = sp.degree();
    if (D < 1) throw Error(Errc::InvalidArgument, "generating function needs degree >= 1");
    const Poly2 s2 = partial(sp, 2);

    // constant term: s(0, z) = 0
    double z = 1.0;
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
        double f = 0.0, fp = 0.0;
        for (int j = D; j >= 0; --j) {
            fp = fp * z + f;
            f = f * z + sp.get(0, j);
        }
        if (std::abs(fp) <= kTauSing) throw Error(Errc::SingularDenominator, "s_2(0, z) vanishes at the start value");
        const double step = f / fp;
        z -= step;
        if (!std::isfinite(z)) break;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) {
            ok = true;
            break;
        }
    }
    if (!ok) throw Error(Errc::NoConvergence, "no constant midpoint root");
    if (std::abs(2.0 * eval(s2, 0.0, z)) <= kTauSing) {
        throw Error(Errc::SingularDenominator, "midpoint denominator vanishes at the start value");
    }

    const double target = opt.tol_rel * coef_norm(sp);
    Poly2 Z = Poly2::constant(z, D, opt.radius);
    for (int it = 0; it <= opt.max_iter; ++it) {
        PowerCache pc(Z, D);
        const Poly2 Fx = pc.subst_x_w(sp);
        const Poly2 F = add(Fx, swap_args(Fx)).without_tail();
        const double res = coef_norm(F);
        if (res <= target) return {Z, res, it, std::move(pc)};
        if (it == opt.max_iter) break;
        const Poly2 Gx = pc.subst_x_w(s2);
        const Poly2 G = add(Gx, swap_args(Gx)).without_tail();
        if (std::abs(G.get(0, 0)) <= kTauSing) throw Error(Errc::SingularDenominator, "midpoint Newton denominator");
        Z = symmetrize_swap(sub(Z, divide(F, G))).without_tail();
        if (!Z.all_finite()) break;
    }
    throw Error(Errc::NoConvergence, "midpoint Newton did not reach tolerance");
}

Poly2 prerenorm(const GenFunction& s, const MidpointSolution& mid) { return mid.powers.subst_w_y(s.poly()); }

Poly2 prerenorm(const GenFunction& s) { return prerenorm(s, solve_midpoint(s)); }

double scaling_lambda(const Poly2& P) {
    double lo = kLambdaLo, hi = kLambdaHi;
    double flo = eval_row(P, lo).f, fhi = eval_row(P, hi).f;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw Error(Errc::NoRootInWindow, "no sign change of P(u,0) in the window");
    double u = kLambdaStart;
    bool done = false;
    for (int it = 0; it < 200 && !done; ++it) {
        const RowValue v = eval_row(P, u);
        if (v.f == 0.0) break;
        if ((v.f > 0.0) == (flo > 0.0)) {
            lo = u;
            flo = v.f;
        } else {
            hi = u;
        }
        double next = v.f1 != 0.0 ? u - v.f / v.f1 : 0.5 * (lo + hi);
        if (!(next > std::min(lo, hi) && next < std::max(lo, hi))) next = 0.5 * (lo + hi);
        done = std::abs(next - u) <= 2e-16 * std::abs(u);
        u = next;
    }
    const RowValue v = eval_row(P, u);
    if (std::abs(v.f1) <= kTauSing) throw Error(Errc::MultipleRootSuspected, "P_1(lambda, 0) nearly vanishes");
    if (std::abs(v.f) > 1e-14 * norm_rho(P)) throw Error(Errc::NoRootInWindow, "root did not converge");
    return u;
}

double scaling_mu(const Poly2& P, double lambda) { return lambda * eval_row(P, lambda).f1; }

double t_shift(const Poly2& P, double c) {
    const double p02 = P.get(0, 2);
    if (std::abs(p02) <= kTauSing) throw Error(Errc::SingularDenominator, "(0,2) coefficient vanishes");
    return 0.25 * (c - P.get(0, 3)) / p02;
}

double t_shift(const GenFunction& s, double c) { return t_shift(prerenorm(s), c); }

double shifted_radius(double rho) { return std::abs(kLambdaLo) * rho; }

Poly2 shifted_prerenorm(const Poly2& P, double t, double rQ) {
    const auto xi = xi_coeffs(t);
    const Poly2 Pxi = compose_separable(P, xi, xi, P.degree(), rQ);
    if (t == 0.0) return Pxi;
    Poly2 factor = Poly2::constant(1.0, P.degree(), rQ);
    factor.set(0, 1, 2.0 * t);
    return mul(factor, Pxi);
}

double normalization_coefficient(const GenFunction& s) { return prerenorm(s).get(0, 3); }

RenormOutcome apply_renorm(const GenFunction& s, const RenormSpec& spec) {
    return renorm_from(s, solve_midpoint(s), spec);
}

RenormOutcome renorm_ekw(const GenFunction& s) { return apply_renorm(s, RenormSpec::ekw()); }
RenormOutcome renorm_c(const GenFunction& s, double c) { return apply_renorm(s, RenormSpec::shifted(c)); }

Poly2 renorm_star(const GenFunction& s, double lambda_star, double mu_star) {
    return apply_renorm(s, RenormSpec::frozen(lambda_star, mu_star)).s_out.poly();
}

Linearization::Linearization(const GenFunction& s, PrerenormTag)
    : s_(s), spec_(RenormSpec::ekw()), prerenorm_only_(true), mid_(solve_midpoint(s)) {
    const Poly2& sp = s.poly();
    const Poly2 s1 = partial(sp, 1), s2 = partial(sp, 2);
    const Poly2 Gx = mid_.powers.subst_x_w(s2);
    const Poly2 G = add(Gx, swap_args(Gx)).without_tail();
    inv_den_ = divide(Poly2::constant(1.0, G.degree(), G.rho()), G).without_tail();
    s1_at_Zy_ = mid_.powers.subst_w_y(s1);
    base_.Z = mid_.Z;
    base_.P = prerenorm(s, mid_);
    base_.midpoint_residual = mid_.residual;
}

Linearization Linearization::prerenorm_only(const GenFunction& s) { return Linearization(s, PrerenormTag{}); }

Linearization::Linearization(const GenFunction& s, const RenormSpec& spec) : Linearization(s, PrerenormTag{}) {
    spec_ = spec;
    prerenorm_only_ = false;
    base_ = renorm_from(s, mid_, spec);
    if (spec.mode == RenormMode::Frozen) return;

    const Poly2& Q = base_.Q;
    const int D = Q.degree();
    if (spec.mode == RenormMode::Shifted) {
        const double t = base_.t, rQ = Q.rho();
        const Poly2& P = base_.P;
        const auto xi = xi_coeffs(t);
        const Poly2 Pxi = compose_separable(P, xi, xi, D, rQ);
        const Poly2 P1xi = compose_separable(partial(P, 1).resized(D), xi, xi, D, rQ);
        const Poly2 P2xi = compose_separable(partial(P, 2).resized(D), xi, xi, D, rQ);
        shift_factor_ = Poly2::constant(1.0, D, rQ);
        shift_factor_.set(0, 1, 2.0 * t);
        const Poly2 inner = add(shift(P1xi, 2, 0), shift(P2xi, 0, 2));
        dq_dt_ = add(scale(shift(Pxi, 0, 1), 2.0), mul(shift_factor_, inner));
    }
    const RowValue v = eval_row(Q, base_.lambda);
    q1_ = v.f1;
    q11_ = v.f2;
    R_euler_ = euler(base_.s_out.poly());
}

Poly2 Linearization::dZ(const Poly2& psi) const {
    const Poly2 hx = mid_.powers.subst_x_w(psi);
    return scale(mul(add(hx, swap_args(hx)), inv_den_), -1.0);
}

Poly2 Linearization::dP(const Poly2& psi) const {
    return add(mul(s1_at_Zy_, dZ(psi)), mid_.powers.subst_w_y(psi));
}

Poly2 Linearization::apply(const Poly2& psi) const {
    if (prerenorm_only_) throw Error(Errc::InvalidArgument, "linearization built for the prerenormalization only");
    const double rho = s_.rho();
    const Poly2 DP = dP(psi);
    if (spec_.mode == RenormMode::Frozen) {
        return scale(scale_args(DP, spec_.lambda_star, rho), 1.0 / spec_.mu_star);
    }
    Poly2 DQ;
    if (spec_.mode == RenormMode::Shifted) {
        const Poly2& P = base_.P;
        const double t = base_.t;
        const double Dt = -(DP.get(0, 3) + 4.0 * t * DP.get(0, 2)) / (4.0 * P.get(0, 2));
        const auto xi = xi_coeffs(t);
        const Poly2 DPxi = compose_separable(DP, xi, xi, DP.degree(), base_.Q.rho());
        DQ = axpy(mul(shift_factor_, DPxi), Dt, dq_dt_);
    } else {
        DQ = DP;
    }
    const double lam = base_.lambda, mu = base_.mu;
    const RowValue dq = eval_row(DQ, lam);
    const double Dlam = -dq.f / q1_;
    const double Dmu = Dlam * q1_ + lam * (q11_ * Dlam + dq.f1);
    Poly2 out = scale(scale_args(DQ, lam, rho), 1.0 / mu);
    out = axpy(out, -Dmu / mu, base_.s_out.poly());
    out = axpy(out, Dlam / lam, R_euler_);
    return out;
}

Poly2 Linearization::apply_fd(const Poly2& psi, double h) const {
    const double n = norm_rho(psi.without_tail());
    if (n == 0.0) return Poly2(s_.degree(), s_.rho());
    const double step = h / n;
    const Poly2 plus = apply_renorm(GenFunction::unchecked(axpy(s_.poly(), step, psi)), spec_).s_out.poly();
    const Poly2 minus = apply_renorm(GenFunction::unchecked(axpy(s_.poly(), -step, psi)), spec_).s_out.poly();
    return scale(sub(plus, minus), 0.5 / step);
}

Poly2 dprerenorm(const GenFunction& s, const Poly2& psi) {
    return Linearization::prerenorm_only(s).dP(psi);
}

Poly2 drenorm_c(const GenFunction& s, const Poly2& psi, double c) {
    return Linearization(s, RenormSpec::shifted(c)).apply(psi);
}

Poly2 psi_vector(const GenFunction& s) {
    const int D = std::max(s.degree(), 1);
    const Poly2 p = s.poly().resized(D);
    const Poly2 s1 = partial(p, 1).resized(D), s2 = partial(p, 2).resized(D);
    return add(add(shift(s1, 2, 0), shift(s2, 0, 2)), scale(shift(p, 0, 1), 2.0));
}

Poly2 psi_ekw_vector(const GenFunction& s) {
    const Poly2 p = s.poly().resized(std::max(s.degree(), 1));
    return sub(sub(psi_vector(s), p), euler(p));
}

Poly2 psi_ekw_vector_printed(const GenFunction& s) {
    const Poly2 p = s.poly().resized(std::max(s.degree(), 1));
    return sub(add(psi_vector(s), p), euler(p));
}

}  // namespace pdren
