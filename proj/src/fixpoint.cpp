#include "pdren/fixpoint.hpp"

#include <cmath>
#include <random>

#include "pdren/spectrum.hpp"

namespace pdren {

double l1_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

InverseCertificate inverse_certificate(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B0) {
    if (A.rows() != A.cols() || B0.rows() != A.rows() || B0.cols() != A.cols()) {
        throw Error(Errc::InvalidArgument, "inverse_certificate needs square matrices of equal size");
    }
    using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const MatL R = A.cast<long double>() * B0.cast<long double>() - MatL::Identity(A.rows(), A.cols());
    long double eps = 0.0L;
    for (Eigen::Index c = 0; c < R.cols(); ++c) eps = std::max(eps, R.col(c).cwiseAbs().sum());
    InverseCertificate out;
    // N[0] = A B0 - I and DN = I - A B0 share the same l1 norm
    out.eps = static_cast<double>(eps);
    out.D = out.eps;
    if (!std::isfinite(out.D) || out.D >= 1.0) {
        throw Error(Errc::NotContractive, "|I - A B0|_1 = " + std::to_string(out.D));
    }
    out.delta = static_cast<double>(static_cast<long double>(l1_norm(B0)) * eps / (1.0L - eps));
    return out;
}

std::pair<double, double> DeflationData::coords(const Poly2& h) const {
    if (empty()) return {0.0, 0.0};
    const auto full = expand_in_basis(h, *table, false);
    const auto& hp = table->head_positions();
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t q = 0; q < hp.size(); ++q) {
        const double v = full[static_cast<std::size_t>(hp[q])];
        c1 += dual1[q] * v;
        c2 += dual2[q] * v;
    }
    return {c1, c2};
}

namespace {

Poly2 add_modes(const Poly2& h, const DeflationData& d, double a1, double a2) {
    Poly2 out = h;
    if (a1 != 0.0) out = axpy(out, a1, d.e1.resized(out.degree()));
    if (a2 != 0.0) out = axpy(out, a2, d.e2.resized(out.degree()));
    return out;
}

}  // namespace

Poly2 DeflationData::apply_K(const Poly2& h) const {
    Poly2 zero(h.degree(), h.rho());
    if (empty()) return zero;
    const auto [c1, c2] = coords(h);
    return add_modes(zero, *this, delta1_hat * c1, delta2_hat * c2);
}

Poly2 DeflationData::apply_I_minus_K(const Poly2& h) const {
    if (empty()) return h;
    const auto [c1, c2] = coords(h);
    return add_modes(h, *this, -delta1_hat * c1, -delta2_hat * c2);
}

Poly2 DeflationData::apply_M(const Poly2& h) const {
    if (empty()) return h;
    const auto [c1, c2] = coords(h);
    return add_modes(h, *this, delta1_hat / (1.0 - delta1_hat) * c1, delta2_hat / (1.0 - delta2_hat) * c2);
}

FixedPointResult find_fixed_point(const GenFunction& s0, double c0, const DeflationData& defl,
                                  const FixedPointOptions& opt, const Poly2* h_start) {
    const Poly2 base = s0.poly().without_tail();
    Poly2 h = h_start ? h_start->resized(base.degree()).without_tail() : Poly2(base.degree(), base.rho());
    FixedPointResult res;
    for (int it = 1; it <= opt.max_iter; ++it) {
        const double hn = norm_rho(h);
        if (!(hn <= opt.ball)) throw Error(Errc::Diverged, "iterate left the working ball, |h| = " + std::to_string(hn));
        const Poly2 s = add(base, defl.apply_M(h));
        RenormOutcome out = renorm_c(GenFunction::unchecked(s), c0);
        const Poly2 step = sub(out.s_out.poly().without_tail(), s);
        const double r = norm_rho(step);
        res.history.push_back(r);
        if (r <= opt.tol * (1.0 + hn)) {
            res.s_star = GenFunction::unchecked(s);
            res.outcome = std::move(out);
            res.h = std::move(h);
            res.iterations = it;
            return res;
        }
        h = add(h, step);
    }
    throw Error(Errc::NoConvergence, "no convergence after " + std::to_string(opt.max_iter) + " iterations");
}

NewtonStep newton_head_step(const GenFunction& s, const RenormSpec& spec, int N_head) {
    NewtonStep out;
    if (N_head <= 0) {
        const RenormOutcome o = apply_renorm(s, spec);
        const Poly2 R = o.s_out.poly().without_tail();
        out.residual_before = norm_rho(sub(R, s.poly().without_tail()));
        out.s = GenFunction::unchecked(R);
        return out;
    }
    const BasisTable T(N_head, s.degree(), s.rho());
    const Linearization lin(s, spec);
    const Poly2 R = lin.base().s_out.poly().without_tail();
    const Poly2 r = sub(R, s.poly().without_tail());
    out.residual_before = norm_rho(r);

    const auto& hp = T.head_positions();
    const AssembledMatrix J = assemble(lin, T, hp, hp);
    const auto rc = expand_in_basis(r, T, false);
    const Eigen::Index n = static_cast<Eigen::Index>(hp.size());
    Eigen::VectorXd rh(n);
    for (Eigen::Index q = 0; q < n; ++q) rh(q) = rc[static_cast<std::size_t>(hp[static_cast<std::size_t>(q)])];
    const Eigen::MatrixXd IJ = Eigen::MatrixXd::Identity(n, n) - J.D;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(IJ);
    if (!(std::abs(lu.determinant()) > 0.0) || lu.rcond() < 1e-14) {
        throw Error(Errc::SingularJacobian, "head Jacobian is singular");
    }
    const Eigen::VectorXd dh = lu.solve(rh);
    // head of s moves by dh; the tail takes the operator image
    std::vector<double> corr(static_cast<std::size_t>(T.size()), 0.0);
    for (Eigen::Index q = 0; q < n; ++q) corr[static_cast<std::size_t>(hp[static_cast<std::size_t>(q)])] = dh(q) - rh(q);
    out.s = GenFunction::unchecked(symmetrize(add(R, from_basis(corr, T))).poly);
    return out;
}

GenFunction newton_head_refine(const GenFunction& s, double c0, int N_head) {
    return newton_head_step(s, RenormSpec::shifted(c0), N_head).s;
}

NewtonRun newton_solve(const GenFunction& s, const RenormSpec& spec, int N_head, int max_steps, double tol) {
    NewtonRun run;
    run.s = s;
    for (int k = 0; k < max_steps; ++k) {
        NewtonStep st = newton_head_step(run.s, spec, N_head);
        run.residuals.push_back(st.residual_before);
        if (st.residual_before <= tol) return run;
        run.s = std::move(st.s);
    }
    const RenormOutcome o = apply_renorm(run.s, spec);
    const double r = norm_rho(sub(o.s_out.poly().without_tail(), run.s.poly().without_tail()));
    run.residuals.push_back(r);
    if (r > tol) throw Error(Errc::NoConvergence, "head Newton stalled at residual " + std::to_string(r));
    return run;
}

double eigenbasis_norm(const Poly2& h, const BasisTable& table, const Eigen::MatrixXd& B) {
    const auto full = expand_in_basis(h, table, false);
    const auto head = head_coords(full, table);
    const Eigen::VectorXd w =
        B * Eigen::Map<const Eigen::VectorXd>(head.data(), static_cast<Eigen::Index>(head.size()));
    double n = w.lpNorm<1>() + h.tail();
    for (int p : table.tail_positions()) n += std::abs(full[static_cast<std::size_t>(p)]);
    return n;
}

namespace {

Poly2 head_function(const Eigen::VectorXd& head, const BasisTable& table) {
    std::vector<double> full(static_cast<std::size_t>(table.size()), 0.0);
    const auto& hp = table.head_positions();
    for (std::size_t q = 0; q < hp.size(); ++q) full[static_cast<std::size_t>(hp[q])] = head(static_cast<Eigen::Index>(q));
    return from_basis(full, table);
}

Poly2 random_symmetric(const BasisTable& table, double norm, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> c(static_cast<std::size_t>(table.size()));
    double sum = 0.0;
    for (auto& v : c) {
        v = u(rng);
        sum += std::abs(v);
    }
    for (auto& v : c) v *= norm / sum;
    return from_basis(c, table);
}

// |(L - K) M v|_e
double deflated_image_norm(const Linearization& lin, const DeflationData& defl, const Poly2& v,
                           const Eigen::MatrixXd& B) {
    const Poly2 Mv = defl.apply_M(v);
    const Poly2 img = sub(lin.apply(Mv), defl.apply_K(Mv));
    return eigenbasis_norm(img, *defl.table, B);
}

}  // namespace

Certificate contraction_certificate(const GenFunction& s_star, double c0, const DeflationData& defl,
                                    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double alpha,
                                    const CertificateOptions& opt) {
    if (defl.empty()) throw Error(Errc::InvalidArgument, "contraction_certificate needs a basis table");
    const BasisTable& T = *defl.table;
    Certificate cert;
    cert.alpha = alpha;
    cert.rho_ball = opt.rho_ball;

    const Linearization lin(s_star, RenormSpec::shifted(c0));
    const Poly2 resid = sub(lin.base().s_out.poly().without_tail(), s_star.poly().without_tail());
    cert.epsilon = eigenbasis_norm(resid, T, B);
    cert.epsilon_rho = norm_rho(resid);

    // columns: head eigenvectors, then the tail basis vectors
    const auto& tp = T.tail_positions();
    const int nh = static_cast<int>(A.cols());
    const int nt = static_cast<int>(tp.size());
    std::vector<double> col(static_cast<std::size_t>(nh + nt));
    parallel_for(nh + nt, [&](int c) {
        const Poly2 v = c < nh ? head_function(A.col(c), T) : T.vector(tp[static_cast<std::size_t>(c - nh)] + 1);
        col[static_cast<std::size_t>(c)] = deflated_image_norm(lin, defl, v, B);
    });
    double top = 0.0;
    for (int c = 0; c < nh + nt; ++c) {
        cert.D_columns = std::max(cert.D_columns, col[static_cast<std::size_t>(c)]);
        if (c >= nh && T.entries()[static_cast<std::size_t>(tp[static_cast<std::size_t>(c - nh)])].grade() == T.M() - 1) {
            top = std::max(top, col[static_cast<std::size_t>(c)]);
        }
    }
    cert.D_columns = std::max(cert.D_columns, top * kCompactnessRatio);

    std::mt19937_64 rng(opt.seed);
    std::vector<Poly2> points, dirs;
    for (int k = 0; k < opt.n_samples; ++k) {
        points.push_back(random_symmetric(T, opt.rho_ball, rng));
        dirs.push_back(random_symmetric(T, 1.0, rng));
    }
    std::vector<double> ratio(static_cast<std::size_t>(opt.n_samples), 0.0);
    parallel_for(opt.n_samples, [&](int k) {
        const Poly2 s = add(s_star.poly().without_tail(), defl.apply_M(points[static_cast<std::size_t>(k)]));
        const Linearization lk(GenFunction::unchecked(s), RenormSpec::shifted(c0));
        const Poly2& d = dirs[static_cast<std::size_t>(k)];
        ratio[static_cast<std::size_t>(k)] = deflated_image_norm(lk, defl, d, B) / eigenbasis_norm(d, T, B);
    });
    for (double r : ratio) cert.D_sampled = std::max(cert.D_sampled, r);

    cert.D_bound = std::max(cert.D_columns, cert.D_sampled);
    cert.radius_ok = std::isfinite(cert.epsilon) && std::isfinite(cert.D_bound) && cert.D_bound < 1.0 &&
                     cert.epsilon < (1.0 - cert.D_bound) * opt.rho_ball / alpha;
    return cert;
}

}  // namespace pdren
