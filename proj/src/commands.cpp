#include "pdren/commands.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "pdren/fixpoint.hpp"
#include "pdren/mapdyn.hpp"
#include "pdren/spectrum.hpp"

namespace pdren {

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

std::string series_text(const Poly2& p) {
    std::ostringstream os;
    write_series(os, p);
    return os.str();
}

Json base_inputs(const RunConfig& cfg) {
    Json j;
    j["rho"] = cfg.rho;
    j["deg"] = cfg.deg;
    j["head"] = cfg.N_head;
    return j;
}

Json complex_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

void write_report(const RunConfig& cfg, const Report& r) {
    write_file_atomic(out_path(cfg, r.command + ".json"), r.to_json().dump(2) + "\n");
}

std::shared_ptr<const BasisTable> make_table(const RunConfig& cfg, int N) {
    return std::make_shared<const BasisTable>(N, cfg.deg, cfg.rho);
}

// empty cells for values a level does not have
std::string csv_cell(const std::vector<double>& v, std::size_t i) {
    return i < v.size() ? format_csv_number(v[i]) : std::string();
}

}  // namespace

GenFunction load_generating_function(const std::string& path, const RunConfig& cfg) {
    Poly2 p = load_series(path);
    if (std::abs(p.rho() - cfg.rho) > 1e-15 * cfg.rho) {
        throw Error(Errc::MismatchedDomain, path + ": series radius " + std::to_string(p.rho()) +
                                                " differs from configured rho " + std::to_string(cfg.rho));
    }
    if (p.degree() != cfg.deg) p = p.resized(cfg.deg);
    return GenFunction(std::move(p));
}

double resolve_c0(const RunConfig& cfg) {
    if (cfg.c0) return *cfg.c0;
    return normalization_coefficient(load_generating_function(cfg.resolved_s0(), cfg));
}

GenFunction seed_polynomial(int deg, double rho) {
    // s = x - 1 + b y^2 has lambda close to 2 - 2b for the doubled map
    const double b = (2.0 - kLambdaStart) / 2.0;
    Poly2 s(deg, rho);
    s.set(0, 0, -1.0);
    s.set(1, 0, 1.0);
    s.set(0, 2, b);
    return GenFunction(std::move(s));
}

int exit_code(const Report& r) { return r.all_pass() ? 0 : 3; }

Report cmd_seed(const RunConfig& cfg) {
    const NewtonRun run = newton_solve(seed_polynomial(cfg.deg, cfg.rho), RenormSpec::ekw(), cfg.N_head, 30,
                                       cfg.fixpoint_tol);
    const RenormOutcome out = renorm_ekw(run.s);
    Report r;
    r.command = "seed";
    r.inputs = base_inputs(cfg);
    r.outputs["newton_residuals"] = run.residuals;
    r.outputs["c0"] = normalization_coefficient(run.s);
    r.outputs["lambda"] = out.lambda;
    r.outputs["mu"] = out.mu;
    r.check("lambda_star", out.lambda);
    r.check("mu_star", out.mu);
    write_file_atomic(out_path(cfg, "s0.txt"), series_text(run.s.poly()));
    write_report(cfg, r);
    return r;
}

Report cmd_renorm(const RunConfig& cfg) {
    const std::string path = cfg.resolved_s0();
    const GenFunction s = load_generating_function(path, cfg);
    const double c0 = resolve_c0(cfg);
    const RenormOutcome out = cfg.ekw_mode ? renorm_ekw(s) : renorm_c(s, c0);
    Report r;
    r.command = "renorm";
    r.inputs = base_inputs(cfg);
    r.inputs["s0_digest"] = file_digest(path);
    r.inputs["mode"] = cfg.ekw_mode ? "ekw" : "shifted";
    r.inputs["c0"] = c0;
    r.outputs["lambda"] = out.lambda;
    r.outputs["mu"] = out.mu;
    r.outputs["t"] = out.t;
    r.outputs["residuals"] = {{"midpoint", out.midpoint_residual},
                              {"symmetry_drift", out.symmetry_drift},
                              {"fixed_point", norm_rho(sub(out.s_out.poly(), s.poly()))}};
    r.outputs["norms"] = {{"input", norm_rho(s.poly())}, {"output", norm_rho(out.s_out.poly())},
                          {"output_tail", out.s_out.poly().tail()}};
    r.check("lambda_star", out.lambda);
    r.check("mu_star", out.mu);
    write_file_atomic(out_path(cfg, "renorm_out.txt"), series_text(out.s_out.poly()));
    write_report(cfg, r);
    return r;
}

Report cmd_fixpoint(const RunConfig& cfg) {
    const std::string path = cfg.resolved_s0();
    const GenFunction s0 = load_generating_function(path, cfg);
    const double c0 = cfg.c0 ? *cfg.c0 : normalization_coefficient(s0);
    const auto table = make_table(cfg, cfg.N_head);

    SpectrumOptions so;
    so.with_projected_norms = false;
    const SpectrumReport sp = stable_spectral_radius(s0, RenormSpec::shifted(c0), table, so);
    const DeflationData defl = deflation_from({sp.eigenvalues, sp.A, {}}, sp.B, table);

    FixedPointOptions fo;
    fo.max_iter = cfg.fixpoint_max_iter;
    fo.tol = cfg.fixpoint_tol;
    fo.ball = cfg.ball;
    const FixedPointResult fp = find_fixed_point(s0, c0, defl, fo);

    CertificateOptions co;
    co.rho_ball = cfg.rho_ball;
    co.n_samples = cfg.n_samples;
    co.seed = cfg.seed;
    const Certificate cert = contraction_certificate(fp.s_star, c0, defl, sp.A, sp.B, sp.alpha, co);
    const double dist = norm_rho(sub(fp.s_star.poly(), s0.poly()));

    Report r;
    r.command = "fixpoint";
    r.inputs = base_inputs(cfg);
    r.inputs["s0_digest"] = file_digest(path);
    r.inputs["c0"] = c0;
    r.inputs["seed"] = cfg.seed;
    r.outputs["lambda"] = fp.outcome.lambda;
    r.outputs["mu"] = fp.outcome.mu;
    r.outputs["t"] = fp.outcome.t;
    r.outputs["eps"] = cert.epsilon;
    r.outputs["eps_rho"] = cert.epsilon_rho;
    r.outputs["D_bound"] = cert.D_bound;
    r.outputs["D_columns"] = cert.D_columns;
    r.outputs["D_sampled"] = cert.D_sampled;
    r.outputs["alpha"] = cert.alpha;
    r.outputs["radius_ok"] = cert.radius_ok;
    r.outputs["iterations"] = fp.iterations;
    r.outputs["history"] = fp.history;
    r.outputs["distance_to_s0"] = dist;
    r.check("lambda_star", fp.outcome.lambda);
    r.check("mu_star", fp.outcome.mu);
    r.check("t_shift_abs", std::abs(fp.outcome.t));
    r.check("fixed_point_distance", dist);
    r.check("epsilon_residual", cert.epsilon_rho);
    r.check("contraction_D", cert.D_bound);

    write_file_atomic(cfg.resolved_s_star(), series_text(fp.s_star.poly()));
    write_report(cfg, r);
    return r;
}

Report cmd_spectrum(const RunConfig& cfg) {
    const std::string path = cfg.resolved_s_star();
    const GenFunction s = load_generating_function(path, cfg);
    const double c0 = resolve_c0(cfg);
    const RenormSpec spec = cfg.ekw_mode ? RenormSpec::ekw() : RenormSpec::shifted(c0);
    const auto table = make_table(cfg, cfg.N_head);
    SpectrumOptions so;
    so.method = cfg.fd_oracle ? AssemblyMethod::FiniteDifference : AssemblyMethod::Exact;
    so.fd_step = cfg.fd_step;
    so.with_projected_norms = !cfg.ekw_mode;
    const SpectrumReport sp = stable_spectral_radius(s, spec, table, so);

    Report r;
    r.command = cfg.ekw_mode ? "spectrum_ekw" : "spectrum";
    r.inputs = base_inputs(cfg);
    r.inputs["s_star_digest"] = file_digest(path);
    r.inputs["mode"] = cfg.ekw_mode ? "ekw" : "shifted";
    r.inputs["assembly"] = cfg.fd_oracle ? "finite_difference" : "exact";
    r.inputs["c0"] = c0;
    r.outputs["lambda"] = sp.lambda;
    r.outputs["mu"] = sp.mu;
    r.outputs["t"] = sp.t;
    r.outputs["delta1"] = complex_json(sp.delta1);
    r.outputs["delta2"] = complex_json(sp.delta2);
    r.outputs["kappa3"] = complex_json(sp.kappa3);
    r.outputs["tail_estimate"] = sp.tail_estimate;
    r.outputs["tail_input_norm"] = sp.tail_input_norm;
    r.outputs["stable_radius"] = sp.stable_radius;
    r.outputs["alpha"] = sp.alpha;
    r.outputs["eig_residual"] = sp.eig_residual;
    r.outputs["inverse_certificate"] = {{"D", sp.inverse.D}, {"delta", sp.inverse.delta}};

    double lambda_gap = INFINITY;
    for (const auto& z : sp.eigenvalues) lambda_gap = std::min(lambda_gap, std::abs(z - sp.lambda));
    r.outputs["closest_to_lambda"] = lambda_gap;

    if (cfg.ekw_mode) {
        r.check("ekw_lambda_distance", lambda_gap);
    } else {
        const ProjectedNorms& n = sp.norms;
        r.outputs["projected_norms"] = {{"P2_L_e1", n.P2_L_e1},       {"P1_L_e2", n.P1_L_e2},
                                        {"Prest_L_e1", n.Prest_L_e1}, {"Prest_L_e2", n.Prest_L_e2},
                                        {"P1_L_Prest", n.P1_L_Prest}, {"P2_L_Prest", n.P2_L_Prest},
                                        {"P1_L_e1", n.P1_L_e1},       {"P2_L_e2", n.P2_L_e2}};
        const EigenvectorMatch m =
            match_eigenvector({sp.eigenvalues, sp.A, {}}, head_vector(psi_ekw_vector(s), *table));
        r.outputs["psi_ekw_match"] = {{"index", m.index}, {"eigenvalue", complex_json(m.value)},
                                      {"distance", m.distance}};
        r.outputs["shifted_lambda_gap"] = lambda_gap;

        r.check("delta1", sp.delta1.real());
        r.check("delta2_minus_inv_lambda", std::abs(sp.delta2 - 1.0 / sp.lambda));
        r.check("stable_radius", sp.stable_radius);
        r.check("alpha", sp.alpha);
        r.check("eig_residual", sp.eig_residual);
        r.check("inverse_D", sp.inverse.D);
        r.check("shifted_null_eigenvalue", std::abs(m.value));
        r.check("shifted_null_eigvec_distance", m.distance);
        r.check("shifted_lambda_gap", lambda_gap);
        r.check("norm_P2_L_e1", n.P2_L_e1);
        r.check("norm_P1_L_e2", n.P1_L_e2);
        r.check("norm_Prest_L_e1", n.Prest_L_e1);
        r.check("norm_Prest_L_e2", n.Prest_L_e2);
        r.check("norm_P1_L_Prest", n.P1_L_Prest);
        r.check("norm_P2_L_Prest", n.P2_L_Prest);

        if (cfg.N_head + 4 <= cfg.deg) {
            SpectrumOptions quick = so;
            quick.with_projected_norms = false;
            const SpectrumReport wide = stable_spectral_radius(s, spec, make_table(cfg, cfg.N_head + 4), quick);
            const double drift = std::max({std::abs(wide.delta1 - sp.delta1), std::abs(wide.delta2 - sp.delta2),
                                           std::abs(wide.stable_radius - sp.stable_radius)});
            r.outputs["head_growth"] = {{"head", cfg.N_head + 4}, {"delta1", complex_json(wide.delta1)},
                                        {"delta2", complex_json(wide.delta2)},
                                        {"stable_radius", wide.stable_radius}, {"drift", drift}};
            r.check("head_growth_drift", drift);
        }
    }

    std::vector<std::vector<double>> rows;
    for (const auto& z : sp.eigenvalues) rows.push_back({std::abs(z), z.real(), z.imag()});
    write_file_atomic(out_path(cfg, r.command == "spectrum" ? "eigenvalues.csv" : "eigenvalues_ekw.csv"),
                      to_csv({"modulus", "real", "imag"}, rows));
    write_report(cfg, r);
    return r;
}

Report cmd_eigencheck(const RunConfig& cfg) {
    const std::string path = cfg.resolved_s_star();
    const GenFunction s = load_generating_function(path, cfg);
    const double c0 = resolve_c0(cfg);
    const EigenIdentities e = eigen_identities(s, c0);

    Report r;
    r.command = "eigencheck";
    r.inputs = base_inputs(cfg);
    r.inputs["s_star_digest"] = file_digest(path);
    r.inputs["c0"] = c0;
    r.outputs["lambda"] = e.lambda;
    r.outputs["frozen_psi"] = e.frozen;
    r.outputs["ekw_psi"] = e.ekw;
    r.outputs["shifted_null"] = e.shifted_null;
    r.outputs["ekw_psi_printed_form"] = e.ekw_printed;
    r.outputs["shifted_rayleigh_quotient"] = e.shifted_rayleigh;
    r.outputs["shifted_eigen_residual"] = e.shifted_eig_residual;
    r.outputs["shifted_predicted_eigenvalue"] = e.shifted_predicted;
    r.check("eigencheck_frozen_psi", e.frozen);
    r.check("eigencheck_ekw_psi", e.ekw);
    r.check("eigencheck_shifted_null", e.shifted_null);
    write_report(cfg, r);
    return r;
}

Report cmd_cascade(const RunConfig& cfg) {
    CascadeOptions opt;
    opt.k_max = cfg.k_max;
    const CascadeRecord rec = henon_cascade(opt);

    Report r;
    r.command = "cascade";
    r.inputs["k_max"] = cfg.k_max;
    r.outputs["a"] = rec.a_values;
    r.outputs["trace_residuals"] = rec.trace_residuals;
    r.outputs["delta_estimates"] = rec.delta_estimates;
    r.outputs["alpha"] = rec.alpha_values;
    r.outputs["d"] = rec.d_values;
    r.outputs["d_ratios"] = rec.d_ratios;
    if (rec.failed_level > 0) {
        r.outputs["failed_level"] = rec.failed_level;
        r.outputs["error"] = rec.error;
    }

    const auto& a = rec.a_values;
    r.check("henon_a1", a.size() >= 1 ? a[0] : NAN);
    r.check("henon_a2", a.size() >= 2 ? a[1] : NAN);
    double worst = 0.0;
    for (double t : rec.trace_residuals) worst = std::max(worst, t);
    r.check("henon_trace_residual", worst);
    r.check("feigenbaum_delta", rec.delta_estimates.empty() ? NAN : rec.delta_estimates.back());
    try {
        const double scaling = orbit_scaling(rec);
        r.outputs["orbit_scaling"] = scaling;
        r.check("orbit_scaling_abs", std::abs(scaling));
    } catch (const Error& e) {
        if (e.code() != Errc::InsufficientData) throw;
        r.outputs["orbit_scaling_error"] = e.what();
        r.check("orbit_scaling_abs", NAN);
    }

    // delta_k is attached to the level k whose a_k completes it, d_ratio_k = d_k / d_{k+1}
    std::string csv = "k,a_k,delta_k,d_ratio_k\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string delta = i >= 2 ? csv_cell(rec.delta_estimates, i - 2) : std::string();
        csv += std::to_string(i + 1) + "," + format_csv_number(a[i]) + "," + delta + "," +
               csv_cell(rec.d_ratios, i) + "\n";
    }
    write_file_atomic(out_path(cfg, "cascade.csv"), csv);
    write_report(cfg, r);
    return r;
}

Report cmd_mapcheck(const RunConfig& cfg) {
    const std::string path =
        std::filesystem::exists(cfg.resolved_s_star()) ? cfg.resolved_s_star() : cfg.resolved_s0();
    const GenFunction s = load_generating_function(path, cfg);
    const TwistMap m(s);
    const MapCheck mc = map_check(m, cfg.map_points, cfg.seed);
    const auto [lam, mu] = map_scalings(m);
    const RenormOutcome ref = renorm_ekw(s);

    Report r;
    r.command = "mapcheck";
    r.inputs = base_inputs(cfg);
    r.inputs["series_digest"] = file_digest(path);
    r.inputs["points"] = cfg.map_points;
    r.inputs["seed"] = cfg.seed;
    r.outputs["points"] = mc.points;
    r.outputs["skipped"] = mc.skipped;
    r.outputs["max_reversibility"] = mc.max_reversibility;
    r.outputs["max_det_defect"] = mc.max_det_defect;
    r.outputs["max_fd_mismatch"] = mc.max_fd_mismatch;
    r.outputs["map_lambda"] = lam;
    r.outputs["map_mu"] = mu;
    r.outputs["series_lambda"] = ref.lambda;
    r.outputs["series_mu"] = ref.mu;
    r.check("map_lambda_mismatch", std::abs(lam - ref.lambda));
    r.check("map_mu_mismatch", std::abs(mu - ref.mu));
    r.check("reversibility", mc.max_reversibility);
    r.check("symplecticity", mc.max_det_defect);
    r.check("derivative_fd_mismatch", mc.max_fd_mismatch);
    write_report(cfg, r);
    return r;
}

}  // namespace pdren
