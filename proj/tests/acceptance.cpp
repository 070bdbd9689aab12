// Acceptance run: one PASS/FAIL line per criterion, with the measured values.
// Exits 0 when every criterion was evaluated; --strict also fails on FAIL.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "pdren/commands.hpp"
#include "pdren/fixpoint.hpp"
#include "pdren/mapdyn.hpp"
#include "pdren/spectrum.hpp"
#include "support.hpp"

using namespace pdren;

namespace {

constexpr double kNu = 0.1258544921875;

struct Line {
    int id;
    bool pass;
    std::string text;
};

std::vector<Line> lines;

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void record(int id, bool pass, const std::string& text) {
    lines.push_back({id, pass, text});
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", id, text.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool in(const std::string& name, double v) {
    const ConstantInterval& c = constant(name);
    return std::isfinite(v) && v >= c.lo && v <= c.hi;
}

long double inverse_oracle_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B0) {
    using ML = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const ML Al = A.cast<long double>();
    ML inv = Al.fullPivLu().inverse();
    inv += inv * (ML::Identity(A.rows(), A.cols()) - Al * inv);
    const ML E = inv - B0.cast<long double>();
    long double m = 0.0L;
    for (Eigen::Index c = 0; c < E.cols(); ++c) m = std::max(m, E.col(c).cwiseAbs().sum());
    return m;
}

// Property checks that use no reference constants.
void property_suite() {
    std::mt19937_64 rng(1234);
    bool ok = true;
    std::ostringstream msg;

    double worst_sub = -INFINITY;
    for (int n = 0; n < 200; ++n) {
        const Poly2 a = testing::random_poly(12, kRho, 3.0, rng), b = testing::random_poly(12, kRho, 2.0, rng);
        worst_sub = std::max(worst_sub, norm_rho(mul(a, b)) - norm_rho(a) * norm_rho(b));
    }
    ok &= worst_sub <= 1e-12;
    msg << fmt("submult max(|ab|-|a||b|)=%.2e", worst_sub);

    double worst_comp = 0.0;
    for (int n = 0; n < 5; ++n) {
        const Poly2 s = testing::random_poly(6, kRho, 1.0, rng);
        Poly2 u = testing::random_poly(6, kRho, 1.0, rng, 36), v = testing::random_poly(6, kRho, 1.0, rng, 36);
        u = scale(u, 0.5 * kRho / norm_rho(u));
        v = scale(v, 0.5 * kRho / norm_rho(v));
        const Poly2 c = compose2(s, u, v);
        for (double px : {-0.8, -0.1, 0.5})
            for (double py : {-0.6, 0.2, 0.9}) {
                const double direct = eval(s, eval(u, px, py), eval(v, px, py));
                worst_comp = std::max(worst_comp, std::abs(direct - eval(c, px, py)) / std::max(1.0, std::abs(direct)));
            }
    }
    ok &= worst_comp <= 1e-12;
    msg << fmt(", compose oracle %.2e", worst_comp);

    double worst_mid = 0.0;
    for (int n = 0; n < 5; ++n) {
        const Poly2 d = scale(testing::random_direction(10, 60, kRho, rng), 1e-3);
        const MidpointSolution m = solve_midpoint(GenFunction(add(testing::shipped_s0().poly(), d)));
        worst_mid = std::max(worst_mid, testing::max_abs_diff(m.Z, swap_args(m.Z)));
    }
    ok &= worst_mid <= 1e-12;
    msg << fmt(", midpoint asym %.2e", worst_mid);

    const GenFunction& s0 = testing::shipped_s0();
    const Linearization lin(s0, RenormSpec::shifted(normalization_coefficient(s0)));
    double worst_fd = 0.0;
    for (int n = 0; n < 20; ++n) {
        const Poly2 psi = testing::random_direction(10, 60, kRho, rng);
        const Poly2 ex = lin.apply(psi);
        worst_fd = std::max(worst_fd, testing::coef_norm(sub(lin.apply_fd(psi), ex)) / testing::coef_norm(ex));
    }
    ok &= worst_fd <= 1e-6;
    msg << fmt(", derivative vs FD (20 dirs) %.2e", worst_fd);

    const BasisTable T(22, 60, kRho);
    double worst_iso = 0.0;
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int n = 0; n < 5; ++n) {
        std::vector<double> c(static_cast<std::size_t>(T.size()));
        double l1 = 0.0;
        for (auto& v : c) l1 += std::abs(v = U(rng));
        const Poly2 p = from_basis(c, T);
        const std::vector<double> back = expand_in_basis(p, T);
        double err = 0.0;
        for (std::size_t q = 0; q < c.size(); ++q) err += std::abs(back[q] - c[q]);
        worst_iso = std::max({worst_iso, err / l1, std::abs(norm_rho(p) - l1) / l1});
    }
    ok &= worst_iso <= 1e-12;
    msg << fmt(", basis round trip %.2e", worst_iso);

    const MapCheck mc = map_check(TwistMap(s0), 100, 20240611);
    ok &= mc.max_reversibility <= 1e-10 && mc.max_det_defect <= 1e-10;
    msg << fmt(", map reversibility %.2e det %.2e (%d/%d points)", mc.max_reversibility, mc.max_det_defect,
               mc.points - mc.skipped, mc.points);
    record(10, ok, msg.str());
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
    try {
        const GenFunction& s0 = testing::shipped_s0();
        const double c0 = normalization_coefficient(s0);
        const auto table = std::make_shared<const BasisTable>(22, 60, kRho);

        // 1 and 6: fixed point
        auto t0 = std::chrono::steady_clock::now();
        SpectrumOptions quick;
        quick.with_projected_norms = false;
        const SpectrumReport seed_sp = stable_spectral_radius(s0, RenormSpec::shifted(c0), table, quick);
        const DeflationData defl = deflation_from({seed_sp.eigenvalues, seed_sp.A, {}}, seed_sp.B, table);
        const FixedPointResult fp = find_fixed_point(s0, c0, defl);
        const double t_fix = seconds_since(t0);
        const GenFunction& s_star = fp.s_star;
        const double lam = fp.outcome.lambda, mu = fp.outcome.mu;
        record(1, in("lambda_star", lam) && in("mu_star", mu) && t_fix < 120.0,
               fmt("lambda=%.17g mu=%.17g (%d iterations, %.1f s)", lam, mu, fp.iterations, t_fix));

        // 2 and 3
        const SpectrumReport sp = stable_spectral_radius(s_star, RenormSpec::shifted(c0), table);
        const double d2gap = std::abs(sp.delta2 - 1.0 / sp.lambda);
        record(2, in("delta1", sp.delta1.real()) && sp.delta1.imag() == 0.0 && d2gap <= 1e-6,
               fmt("delta1=%.12g delta2=%.12g 1/lambda=%.12g |delta2-1/lambda|=%.2e", sp.delta1.real(),
                   sp.delta2.real(), 1.0 / sp.lambda, d2gap));

        const SpectrumReport sp26 =
            stable_spectral_radius(s_star, RenormSpec::shifted(c0), std::make_shared<const BasisTable>(26, 60, kRho), quick);
        const double drift = std::max({std::abs(sp26.delta1 - sp.delta1), std::abs(sp26.delta2 - sp.delta2),
                                       std::abs(sp26.stable_radius - sp.stable_radius)});
        record(3, sp.stable_radius <= kNu && drift <= 1e-6,
               fmt("|kappa3|=%.12g + tail %.2e = %.12g <= %.13g; head 22->26 drift %.2e", std::abs(sp.kappa3),
                   sp.tail_estimate, sp.stable_radius, kNu, drift));

        // 4
        const SpectrumReport ekw = stable_spectral_radius(s_star, RenormSpec::ekw(), table, quick);
        double ekw_gap = INFINITY, shifted_gap = INFINITY;
        for (const auto& z : ekw.eigenvalues) ekw_gap = std::min(ekw_gap, std::abs(z - ekw.lambda));
        for (const auto& z : sp.eigenvalues) shifted_gap = std::min(shifted_gap, std::abs(z - sp.lambda));
        const EigenvectorMatch m =
            match_eigenvector({sp.eigenvalues, sp.A, {}}, head_vector(psi_ekw_vector(s_star), *table));
        record(4, ekw_gap <= 1e-6 && shifted_gap > 1e-6 && std::abs(m.value) <= 1e-6 && m.distance <= 1e-5,
               fmt("ekw mode |ev-lambda|=%.2e; shifted mode nearest to lambda %.3g; psi_EKW eigenvector "
                   "distance %.2e with eigenvalue %.6g (needs |ev|<=1e-6)",
                   ekw_gap, shifted_gap, m.distance, m.value.real()));

        // 5
        const EigenIdentities e = eigen_identities(s_star, c0);
        record(5, e.frozen <= 1e-6 && e.ekw <= 1e-6 && e.shifted_null <= 1e-6,
               fmt("frozen %.2e, ekw %.2e, shifted null %.2e (psi_EKW eigenvalue %.6g, lambda c0/P02 = %.6g)",
                   e.frozen, e.ekw, e.shifted_null, e.shifted_rayleigh, e.shifted_predicted));

        // 6
        const Certificate cert = contraction_certificate(s_star, c0, defl, sp.A, sp.B, sp.alpha);
        record(6, std::abs(fp.outcome.t) <= 1e-9 && cert.epsilon_rho <= 1e-13,
               fmt("|t|=%.2e, eps=%.2e", std::abs(fp.outcome.t), cert.epsilon_rho));

        // 7
        const double truth = static_cast<double>(inverse_oracle_error(sp.A, sp.B));
        const double ratio = sp.inverse.delta / truth;
        record(7, sp.inverse.D < 1.0 && ratio >= 0.1 && ratio <= 10.0 && cert.D_sampled <= kNu,
               fmt("D=%.2e delta=%.3e oracle |A^-1-B0|=%.3e ratio %.3g (needs within 10x); sampled D %.2e, "
                   "column D %.6g",
                   sp.inverse.D, sp.inverse.delta, truth, ratio, cert.D_sampled, cert.D_columns));

        // 8, with the tabulated values
        const ProjectedNorms& n = sp.norms;
        const std::pair<double, double> norms[] = {
            {n.P2_L_e1, 5.19007444381714e-4},    {n.P1_L_e2, 1.76560133695602e-4},
            {n.Prest_L_e1, 3.5819411277771e-3},  {n.Prest_L_e2, 1.49521231651306e-3},
            {n.P1_L_Prest, 1.22539699077606e-4}, {n.P2_L_Prest, 8.23289155960083e-5}};
        bool ok8 = true;
        std::string t8;
        for (const auto& [v, ref] : norms) {
            ok8 &= v <= 10.0 * ref;
            t8 += fmt("%s%.3g/%.3g", t8.empty() ? "" : ", ", v, ref);
        }
        record(8, ok8, "computed/table: " + t8);

        // 9
        t0 = std::chrono::steady_clock::now();
        const CascadeRecord cas = henon_cascade();
        const double t_cas = seconds_since(t0);
        const double scaling = orbit_scaling(cas);
        const double dlt = cas.delta_estimates.back();
        const bool a_ok = cas.a_values.size() >= 2 && std::abs(cas.a_values[0] - 3.0) <= 1e-9 &&
                          std::abs(cas.a_values[1] - 4.0) <= 1e-9;
        record(9, a_ok && std::abs(dlt / 8.721 - 1.0) <= 0.01 && std::abs(std::abs(scaling) * std::abs(lam) - 1.0) <= 0.02 &&
                      t_cas < 60.0,
               fmt("a1=%.13g a2=%.13g delta(k=%zu)=%.8g orbit scaling %.8g vs 1/lambda %.8g (%.1f s)", cas.a_values[0],
                   cas.a_values[1], cas.a_values.size(), dlt, scaling, 1.0 / lam, t_cas));

        property_suite();
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "acceptance run aborted: %s\n", ex.what());
        return 1;
    }

    std::ofstream out("acceptance_report.txt");
    int failed = 0;
    for (const auto& l : lines) {
        out << "[" << (l.pass ? "PASS" : "FAIL") << "] criterion " << l.id << ": " << l.text << "\n";
        failed += l.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria pass\n", static_cast<int>(lines.size()) - failed, lines.size());
    return strict && failed > 0 ? 2 : 0;
}
