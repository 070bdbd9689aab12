#include <cmath>
#include <random>

#include "doctest.h"
#include "pdren/mapdyn.hpp"
#include "support.hpp"

using namespace pdren;
using testing::shipped_s0;

namespace {

GenFunction linear_s() {
    Poly2 p(4, kRho);
    p.set(1, 0, 1.0);
    p.set(0, 1, 1.0);
    return GenFunction(p);
}

}  // namespace

TEST_SUITE("mapdyn") {

TEST_CASE("linear generating function gives a linear map") {
    const TwistMap m(linear_s());
    // u = -(y + x) so y = -u - x, then u' = x + y = -u
    const MapPoint p = map_apply(m, 0.3, 0.2);
    CHECK(p.x == doctest::Approx(-0.5));
    CHECK(p.u == doctest::Approx(-0.2));
    const Eigen::Matrix2d J = map_derivative(m, 0.3, 0.2);
    CHECK(J(0, 0) == doctest::Approx(-1.0));
    CHECK(J(0, 1) == doctest::Approx(-1.0));
    CHECK(J(1, 0) == doctest::Approx(0.0));
    CHECK(J(1, 1) == doctest::Approx(-1.0));
    CHECK(J.determinant() == doctest::Approx(1.0));
    CHECK(reversibility_residual(m, 0.3, 0.2) <= 1e-15);
}

TEST_CASE("implicit solve inverts the generating relation") {
    const TwistMap m(shipped_s0());
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (int n = 0; n < 20; ++n) {
        const double x = U(rng), y = U(rng);
        const double u = -m.s(y, x);
        CHECK(m.solve_y(x, u) == doctest::Approx(y).epsilon(1e-12));
    }
}

TEST_CASE("twist violation is reported") {
    Poly2 p(4, kRho);
    p.set(0, 2, 1.0);  // s = y^2, so s_1 vanishes
    const TwistMap m{GenFunction(p)};
    try {
        (void)map_apply(m, 0.1, 0.1);
        FAIL("expected TwistViolation");
    } catch (const Error& e) {
        CHECK((e.code() == Errc::TwistViolation || e.code() == Errc::ImplicitSolveFailure));
    }
}

TEST_CASE("seed map is reversible and area preserving") {
    const TwistMap m(shipped_s0());
    const MapCheck c = map_check(m, 100, 99);
    CHECK(c.points == 100);
    CHECK(c.skipped <= 10);
    CHECK(c.max_reversibility <= 1e-10);
    CHECK(c.max_det_defect <= 1e-10);
    CHECK(c.max_fd_mismatch <= 1e-7);
    const MapCheck again = map_check(m, 100, 99);
    CHECK(again.max_reversibility == c.max_reversibility);
}

TEST_CASE("map scalings reproduce the series scalings") {
    const TwistMap m(shipped_s0());
    const auto [lam, mu] = map_scalings(m);
    const RenormOutcome r = renorm_ekw(shipped_s0());
    CHECK(lam == doctest::Approx(r.lambda).epsilon(1e-12));
    CHECK(mu == doctest::Approx(r.mu).epsilon(1e-12));
}

TEST_CASE("short cascade") {
    CascadeOptions opt;
    opt.k_max = 5;
    const CascadeRecord r = henon_cascade(opt);
    CHECK(r.failed_level == 0);
    REQUIRE(r.a_values.size() == 5);
    CHECK(std::abs(r.a_values[0] - 3.0) <= 1e-9);
    CHECK(std::abs(r.a_values[1] - 4.0) <= 1e-9);
    for (std::size_t k = 1; k < r.a_values.size(); ++k) CHECK(r.a_values[k] > r.a_values[k - 1]);
    for (double t : r.trace_residuals) CHECK(t <= 1e-9);
    REQUIRE(r.delta_estimates.size() == 3);
    CHECK(r.delta_estimates.back() == doctest::Approx(8.72).epsilon(0.01));
    CHECK(r.d_ratios.size() == 4);
    CHECK(std::abs(orbit_scaling(r)) == doctest::Approx(4.018).epsilon(0.02));
}

TEST_CASE("cascade argument and data errors") {
    CascadeOptions opt;
    opt.k_max = 2;
    const CascadeRecord r = henon_cascade(opt);
    try {
        (void)orbit_scaling(r);
        FAIL("expected InsufficientData");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InsufficientData);
    }
    opt.k_max = 0;
    CHECK_THROWS_AS(henon_cascade(opt), Error);
    opt.k_max = 15;
    CHECK_THROWS_AS(henon_cascade(opt), Error);
}

}
