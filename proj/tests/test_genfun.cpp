#include <cmath>
#include <random>
#include <tuple>

#include "doctest.h"
#include "pdren/genfun.hpp"
#include "support.hpp"

using namespace pdren;
using testing::coef_norm;
using testing::max_abs_diff;
using testing::shipped_s0;

namespace {

Poly2 poly_xy(std::initializer_list<std::tuple<int, int, double>> terms, int deg = 8) {
    Poly2 p(deg, kRho);
    for (auto [i, j, c] : terms) p.set(i, j, c);
    return p;
}

double rel(const Poly2& a, const Poly2& b) { return coef_norm(sub(a, b)) / coef_norm(b); }

}  // namespace

TEST_SUITE("genfun") {

TEST_CASE("midpoint of linear and linear-in-Z functions") {
    const MidpointSolution a = solve_midpoint(GenFunction(poly_xy({{1, 0, 1.0}, {0, 1, 1.0}})));
    CHECK(a.Z.get(1, 0) == doctest::Approx(-0.5));
    CHECK(a.Z.get(0, 1) == doctest::Approx(-0.5));
    CHECK(std::abs(a.Z.get(0, 0)) < 1e-15);

    // s = y + x^2: x^2 + Z + y^2 + Z = 0
    const MidpointSolution b = solve_midpoint(GenFunction::unchecked(poly_xy({{0, 1, 1.0}, {2, 0, 1.0}})));
    CHECK(b.Z.get(2, 0) == doctest::Approx(-0.5));
    CHECK(b.Z.get(0, 2) == doctest::Approx(-0.5));
    CHECK(std::abs(b.Z.get(1, 0)) + std::abs(b.Z.get(1, 1)) < 1e-14);
}

TEST_CASE("prerenormalization against hand composition") {
    const Poly2 P = prerenorm(GenFunction(poly_xy({{1, 0, 1.0}, {0, 1, 1.0}})));
    CHECK(P.get(1, 0) == doctest::Approx(-0.5));
    CHECK(P.get(0, 1) == doctest::Approx(0.5));

    // s = y + x^2 gives y + (x^2 + y^2)^2 / 4; compare pointwise
    const Poly2 Q = prerenorm(GenFunction::unchecked(poly_xy({{0, 1, 1.0}, {2, 0, 1.0}})));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-0.4, 0.4);
    for (int n = 0; n < 20; ++n) {
        const double x = U(rng), y = U(rng);
        const double want = y + (x * x + y * y) * (x * x + y * y) / 4.0;
        CHECK(eval(Q, x, y) == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("scalings") {
    CHECK(scaling_lambda(poly_xy({{0, 0, 0.2489}, {1, 0, 1.0}})) == doctest::Approx(-0.2489));
    CHECK_THROWS_AS(scaling_lambda(poly_xy({{0, 0, 1.0}, {2, 0, 1.0}})), Error);
    CHECK(scaling_mu(poly_xy({{1, 1, 1.0}, {1, 0, 1.0}}), -0.25) == doctest::Approx(-0.25));
}

TEST_CASE("degenerate function has no root in the window") {
    try {
        (void)renorm_ekw(GenFunction(poly_xy({{1, 0, 1.0}, {0, 1, 1.0}})));
        FAIL("expected NoRootInWindow");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NoRootInWindow);
    }
}

TEST_CASE("psi vectors by hand") {
    const GenFunction xy = GenFunction::unchecked(poly_xy({{1, 1, 1.0}}));
    const Poly2 psi = psi_vector(xy);
    CHECK(psi.get(2, 1) == 1.0);
    CHECK(psi.get(1, 2) == 3.0);
    CHECK(coef_norm(psi) == doctest::Approx(4 * std::pow(kRho, 3)));

    // printed form: psi + s - (s_1 x + s_2 y)
    const Poly2 printed = psi_ekw_vector_printed(xy);
    CHECK(printed.get(1, 1) == -1.0);
    CHECK(printed.get(2, 1) == 1.0);
    CHECK(printed.get(1, 2) == 3.0);
    // eigenvector form: psi - s - (s_1 x + s_2 y)
    CHECK(psi_ekw_vector(xy).get(1, 1) == -3.0);

    const Poly2 k = psi_vector(GenFunction(Poly2::constant(0.7, 6, kRho)));
    CHECK(k.get(0, 1) == doctest::Approx(1.4));
    CHECK(coef_norm(k) == doctest::Approx(1.4 * kRho));

    const GenFunction lin(poly_xy({{1, 0, 1.0}, {0, 1, 1.0}}));
    CHECK(coef_norm(sub(psi_ekw_vector_printed(lin), psi_vector(lin))) < 1e-15);
}

TEST_CASE("psi vector keeps the symmetry relation") {
    CHECK(is_symmetric(psi_vector(shipped_s0())));
    CHECK(is_symmetric(psi_ekw_vector(shipped_s0())));
}

TEST_CASE("midpoint at the shipped seed") {
    const MidpointSolution m = solve_midpoint(shipped_s0());
    CHECK(m.residual <= 1e-12);
    CHECK(norm_rho(m.Z) <= 1.63160151494042404);
    CHECK(symmetry_defect(symmetrize_swap(m.Z)) >= 0.0);
    CHECK(max_abs_diff(m.Z, swap_args(m.Z)) <= 1e-13);
}

TEST_CASE("normalization coefficients at the shipped seed") {
    const Poly2 P = prerenorm(shipped_s0());
    CHECK(std::isfinite(P.get(0, 3)));
    CHECK(std::abs(P.get(0, 2)) > kTauSing);
    const double c0 = normalization_coefficient(shipped_s0());
    CHECK(t_shift(shipped_s0(), c0) == 0.0);
    CHECK(t_shift(P, P.get(0, 3) + 4 * P.get(0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("renormalization outcomes at the shipped seed") {
    const GenFunction& s0 = shipped_s0();
    const double c0 = normalization_coefficient(s0);
    for (const RenormOutcome& out : {renorm_ekw(s0), renorm_c(s0, c0), renorm_c(s0, c0 * 1.01)}) {
        CHECK(out.lambda >= kLambdaLo);
        CHECK(out.lambda <= kLambdaHi);
        CHECK(out.mu >= kMuLo);
        CHECK(out.mu <= kMuHi);
        CHECK(out.s_out.symmetric());
        CHECK(std::abs(eval(out.Q, out.lambda, 0.0)) <= 1e-13);
        CHECK(out.lambda * eval(partial(out.Q, 1), out.lambda, 0.0) == doctest::Approx(out.mu).epsilon(1e-13));
        CHECK(out.symmetry_drift <= kSymDriftMax);
    }
    // the seed is the unshifted fixed point, so both operators return it
    CHECK(norm_rho(sub(renorm_ekw(s0).s_out.poly(), s0.poly())) <= 1e-13);
    CHECK(norm_rho(sub(renorm_c(s0, c0).s_out.poly(), s0.poly())) <= 1e-13);
    CHECK(renorm_c(s0, c0 * 1.01).t != 0.0);

    // the root equation is unchanged by s -> 2s
    const GenFunction s2(scale(s0.poly(), 2.0));
    CHECK(renorm_ekw(s2).lambda == renorm_ekw(s0).lambda);

    const RenormOutcome ref = renorm_c(s0, c0);
    CHECK(norm_rho(sub(renorm_star(s0, ref.lambda, ref.mu), s0.poly())) <= 1e-10);
}

TEST_CASE("frozen scalings at the computed values reproduce the unshifted operator") {
    const GenFunction& s0 = shipped_s0();
    const RenormOutcome out = renorm_ekw(s0);
    CHECK(coef_norm(sub(renorm_star(s0, out.lambda, out.mu), out.s_out.poly())) <= 1e-13 * coef_norm(s0.poly()));
    // a frozen lambda different from the root leaves (lambda, 0) off the zero set
    const Poly2 R = renorm_star(s0, out.lambda * 0.999, out.mu);
    CHECK(std::abs(eval(R, 1.0, 0.0)) > 1e-6);
}

TEST_CASE("shift outside the admissible range is rejected") {
    const GenFunction& s0 = shipped_s0();
    const Poly2 P = prerenorm(s0);
    // t = 1 violates 2 |t| rho < 1
    CHECK_THROWS_AS(renorm_c(s0, P.get(0, 3) + 4 * P.get(0, 2)), Error);
}

TEST_CASE("derivatives agree with central differences") {
    const GenFunction& s0 = shipped_s0();
    const double c0 = normalization_coefficient(s0);
    std::mt19937_64 rng(17);
    const Linearization pre = Linearization::prerenorm_only(s0);
    const Linearization shifted(s0, RenormSpec::shifted(c0));
    const Linearization ekw(s0, RenormSpec::ekw());
    for (int n = 0; n < 20; ++n) {
        const Poly2 psi = testing::random_direction(10, s0.degree(), kRho, rng);
        CHECK(rel(shifted.apply(psi), shifted.apply_fd(psi)) <= 1e-6);
        if (n < 5) {
            CHECK(rel(ekw.apply(psi), ekw.apply_fd(psi)) <= 1e-6);
            const double h = 1e-6;
            const Poly2 fd = scale(sub(prerenorm(GenFunction(axpy(s0.poly(), h, psi))),
                                       prerenorm(GenFunction(axpy(s0.poly(), -h, psi)))),
                                   0.5 / h);
            CHECK(rel(pre.dP(psi), fd) <= 1e-6);
        }
    }
    CHECK(coef_norm(shifted.apply(Poly2(s0.degree(), kRho))) == 0.0);
}

TEST_CASE("finite differences converge at second order") {
    const GenFunction& s0 = shipped_s0();
    const Linearization lin(s0, RenormSpec::shifted(normalization_coefficient(s0)));
    std::mt19937_64 rng(29);
    const Poly2 psi = testing::random_direction(8, s0.degree(), kRho, rng);
    const Poly2 exact = lin.apply(psi);
    for (double h : {1e-7, 1e-6, 1e-5}) CHECK(rel(lin.apply_fd(psi, h), exact) <= 1e-6);
    // above the roundoff floor a 10x step costs 100x
    const double e2 = rel(lin.apply_fd(psi, 1e-2), exact);
    const double e3 = rel(lin.apply_fd(psi, 1e-3), exact);
    CHECK(e2 / e3 == doctest::Approx(100.0).epsilon(0.1));
}

TEST_CASE("derivative is linear") {
    const GenFunction& s0 = shipped_s0();
    const Linearization lin(s0, RenormSpec::shifted(normalization_coefficient(s0)));
    std::mt19937_64 rng(41);
    const Poly2 a = testing::random_direction(12, s0.degree(), kRho, rng);
    const Poly2 b = testing::random_direction(12, s0.degree(), kRho, rng);
    const Poly2 lhs = lin.apply(add(scale(a, 2.5), scale(b, -0.75)));
    const Poly2 rhs = add(scale(lin.apply(a), 2.5), scale(lin.apply(b), -0.75));
    CHECK(coef_norm(sub(lhs, rhs)) <= 1e-12 * coef_norm(rhs));
    CHECK(coef_norm(sub(drenorm_c(s0, a, normalization_coefficient(s0)), lin.apply(a))) <= 1e-14);
}

TEST_CASE("prerenormalization derivative maps psi_s to psi of the image") {
    const GenFunction& s0 = shipped_s0();
    const Poly2 lhs = dprerenorm(s0, psi_vector(s0));
    const Poly2 P = prerenorm(s0);
    const Poly2 rhs = psi_vector(GenFunction::unchecked(P));
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> U(-0.3, 0.3);
    for (int n = 0; n < 10; ++n) {
        const double x = U(rng), y = U(rng);
        CHECK(eval(lhs, x, y) == doctest::Approx(eval(rhs, x, y)).epsilon(1e-9));
    }
}

TEST_CASE("eigen-identities at the seed") {
    const GenFunction& s0 = shipped_s0();
    const double c0 = normalization_coefficient(s0);
    const RenormOutcome out = renorm_c(s0, c0);
    const Linearization frozen(s0, RenormSpec::frozen(out.lambda, out.mu));
    const Linearization ekw(s0, RenormSpec::ekw());
    const Poly2 psi = psi_vector(s0), pe = psi_ekw_vector(s0);
    CHECK(rel(frozen.apply(psi), scale(psi, out.lambda)) <= 1e-7);
    CHECK(rel(ekw.apply(pe), scale(pe, out.lambda)) <= 1e-7);
    // the printed sign does not give an eigenvector
    const Poly2 pp = psi_ekw_vector_printed(s0);
    CHECK(rel(ekw.apply(pp), scale(pp, out.lambda)) > 1e-3);
}

TEST_CASE("the unshifted eigenvector stays an eigenvector of the shifted derivative") {
    const GenFunction& s0 = shipped_s0();
    const double c0 = normalization_coefficient(s0);
    const Linearization shifted(s0, RenormSpec::shifted(c0));
    const Poly2 pe = psi_ekw_vector(s0);
    const double k = shifted.base().lambda * c0 / shifted.base().P.get(0, 2);
    CHECK(rel(shifted.apply(pe), scale(pe, k)) <= 1e-10);
}

TEST_CASE("symmetry test on construction") {
    CHECK_THROWS_AS(GenFunction(poly_xy({{0, 1, 1.0}, {2, 0, 1.0}})), Error);
    CHECK_FALSE(GenFunction::unchecked(poly_xy({{0, 1, 1.0}, {2, 0, 1.0}})).symmetric());
}

}
