#include "pdren/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <Eigen/Eigenvalues>

namespace pdren {

void parallel_for(int n, const std::function<void(int)>& fn) {
    const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int workers = std::min(hw, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

AssembledMatrix assemble(const Linearization& lin, const BasisTable& table, std::span<const int> rows,
                         std::span<const int> cols, AssemblyMethod method, double fd_step) {
    AssembledMatrix out;
    out.row_positions.assign(rows.begin(), rows.end());
    out.col_positions.assign(cols.begin(), cols.end());
    out.D.setZero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    out.column_tail.assign(cols.size(), 0.0);
    std::vector<char> is_row(static_cast<std::size_t>(table.size()), 0);
    for (int p : rows) is_row[static_cast<std::size_t>(p)] = 1;

    parallel_for(static_cast<int>(cols.size()), [&](int c) {
        const Poly2& psi = table.vector(cols[static_cast<std::size_t>(c)] + 1);
        const Poly2 img = method == AssemblyMethod::Exact ? lin.apply(psi) : lin.apply_fd(psi, fd_step);
        const auto coeffs = expand_in_basis(img, table, false);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out.D(static_cast<Eigen::Index>(r), c) = coeffs[static_cast<std::size_t>(rows[r])];
        }
        double rest = img.tail();
        for (std::size_t p = 0; p < coeffs.size(); ++p)
            if (!is_row[p]) rest += std::abs(coeffs[p]);
        out.column_tail[static_cast<std::size_t>(c)] = rest;
    });
    return out;
}

Eigen::MatrixXd assemble_matrix(const GenFunction& s, double c0, const BasisTable& table, int N_head) {
    const BasisTable* t = &table;
    BasisTable local;
    if (N_head != table.N()) {
        local = BasisTable(N_head, table.M(), table.rho());
        t = &local;
    }
    const Linearization lin(s, RenormSpec::shifted(c0));
    return assemble(lin, *t, t->head_positions(), t->head_positions()).D;
}

namespace {

bool eig_order(const std::complex<double>& a, const std::complex<double>& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

}  // namespace

EigenDecomposition eigen_decompose(const Eigen::MatrixXd& D) {
    if (D.rows() != D.cols()) throw Error(Errc::InvalidArgument, "eigen_decompose needs a square matrix");
    const Eigen::Index n = D.rows();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(D, true);
    if (solver.info() != Eigen::Success) throw Error(Errc::IterationFailure, "eigenvalue iteration failed");
    const Eigen::VectorXcd vals = solver.eigenvalues();
    const Eigen::MatrixXcd vecs = solver.eigenvectors();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return eig_order(vals(a), vals(b)); });

    EigenDecomposition out;
    out.A.setZero(n, n);
    out.Lambda.setZero(n, n);
    out.values.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index p = 0; p < n; ++p) out.values.push_back(vals(order[static_cast<std::size_t>(p)]));

    for (Eigen::Index p = 0; p < n; ++p) {
        const std::complex<double> lam = out.values[static_cast<std::size_t>(p)];
        Eigen::VectorXcd v = vecs.col(order[static_cast<std::size_t>(p)]);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        v *= std::conj(v(imax)) / std::abs(v(imax));
        if (lam.imag() == 0.0) {
            Eigen::VectorXd a = v.real();
            out.A.col(p) = a / a.lpNorm<1>();
            out.Lambda(p, p) = lam.real();
            continue;
        }
        if (p + 1 >= n || out.values[static_cast<std::size_t>(p + 1)] != std::conj(lam) || lam.imag() < 0.0) {
            throw Error(Errc::IterationFailure, "unpaired complex eigenvalue");
        }
        const Eigen::VectorXd a = v.real(), b = v.imag();
        const double na = a.lpNorm<1>(), nb = b.lpNorm<1>();
        out.A.col(p) = a / na;
        out.A.col(p + 1) = b / nb;
        const double al = lam.real(), be = lam.imag();
        out.Lambda(p, p) = al;
        out.Lambda(p + 1, p) = -be * nb / na;
        out.Lambda(p, p + 1) = be * na / nb;
        out.Lambda(p + 1, p + 1) = al;
        ++p;
    }
    return out;
}

double equivalence_constant(const Eigen::MatrixXd& A) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) s += A.row(i).cwiseAbs().maxCoeff();
    return std::max(s, 1.0);
}

namespace {

struct EigenCoords {
    std::vector<double> w;  // head coordinates in the eigenbasis
    double tail = 0.0;      // l1 mass outside the head, incl. series tail
};

EigenCoords eigen_coords(const Poly2& y, const BasisTable& table, const Eigen::MatrixXd& B) {
    const auto full = expand_in_basis(y, table, false);
    const auto head = head_coords(full, table);
    const Eigen::VectorXd w = B * Eigen::Map<const Eigen::VectorXd>(head.data(), static_cast<Eigen::Index>(head.size()));
    EigenCoords out;
    out.w.assign(w.data(), w.data() + w.size());
    out.tail = y.tail();
    for (int p : table.tail_positions()) out.tail += std::abs(full[static_cast<std::size_t>(p)]);
    return out;
}

double rest_norm(const EigenCoords& c) {
    double s = c.tail;
    for (std::size_t k = 2; k < c.w.size(); ++k) s += std::abs(c.w[k]);
    return s;
}

Poly2 head_function(const Eigen::VectorXd& head, const BasisTable& table) {
    std::vector<double> full(static_cast<std::size_t>(table.size()), 0.0);
    const auto& hp = table.head_positions();
    for (std::size_t q = 0; q < hp.size(); ++q) full[static_cast<std::size_t>(hp[q])] = head(static_cast<Eigen::Index>(q));
    return from_basis(full, table);
}

struct TailColumns {
    std::vector<double> w1, w2, rest;
    std::vector<int> grade;
};

TailColumns tail_columns(const Linearization& lin, const BasisTable& table, const Eigen::MatrixXd& B) {
    const auto& tp = table.tail_positions();
    TailColumns tc;
    tc.w1.resize(tp.size());
    tc.w2.resize(tp.size());
    tc.rest.resize(tp.size());
    tc.grade.resize(tp.size());
    parallel_for(static_cast<int>(tp.size()), [&](int c) {
        const int p = tp[static_cast<std::size_t>(c)];
        const EigenCoords ec = eigen_coords(lin.apply(table.vector(p + 1)), table, B);
        tc.w1[static_cast<std::size_t>(c)] = std::abs(ec.w[0]);
        tc.w2[static_cast<std::size_t>(c)] = std::abs(ec.w[1]);
        tc.rest[static_cast<std::size_t>(c)] = rest_norm(ec);
        tc.grade[static_cast<std::size_t>(c)] = table.entries()[static_cast<std::size_t>(p)].grade();
    });
    return tc;
}

// Largest entry, with the modes beyond the table bounded by the largest
// value on the top grade times the compactness ratio.
double extended_max(const std::vector<double>& v, const std::vector<int>& grade, int top) {
    double m = 0.0, last = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        m = std::max(m, v[i]);
        if (grade[i] == top) last = std::max(last, v[i]);
    }
    return std::max(m, last * kCompactnessRatio);
}

ProjectedNorms norms_from(const Linearization& lin, const BasisTable& table, const EigenDecomposition& eig,
                          const Eigen::MatrixXd& B, const TailColumns& tc) {
    ProjectedNorms pn;
    const EigenCoords c1 = eigen_coords(lin.apply(head_function(eig.A.col(0), table)), table, B);
    const EigenCoords c2 = eigen_coords(lin.apply(head_function(eig.A.col(1), table)), table, B);
    pn.P1_L_e1 = std::abs(c1.w[0]);
    pn.P2_L_e1 = std::abs(c1.w[1]);
    pn.Prest_L_e1 = rest_norm(c1);
    pn.P1_L_e2 = std::abs(c2.w[0]);
    pn.P2_L_e2 = std::abs(c2.w[1]);
    pn.Prest_L_e2 = rest_norm(c2);
    // head sources e_k, k >= 3: the head block is diagonal up to roundoff
    const Eigen::MatrixXd BLA = eig.Lambda;
    double h1 = 0.0, h2 = 0.0;
    for (Eigen::Index k = 2; k < BLA.cols(); ++k) {
        h1 = std::max(h1, std::abs(BLA(0, k)));
        h2 = std::max(h2, std::abs(BLA(1, k)));
    }
    pn.P1_L_Prest = std::max(h1, extended_max(tc.w1, tc.grade, table.M() - 1));
    pn.P2_L_Prest = std::max(h2, extended_max(tc.w2, tc.grade, table.M() - 1));
    return pn;
}

}  // namespace

ProjectedNorms projected_norms(const Linearization& lin, const BasisTable& table, const EigenDecomposition& eig,
                               const Eigen::MatrixXd& B) {
    return norms_from(lin, table, eig, B, tail_columns(lin, table, B));
}

DeflationData deflation_from(const EigenDecomposition& eig, const Eigen::MatrixXd& B,
                             std::shared_ptr<const BasisTable> table) {
    if (eig.values.size() < 2 || eig.values[0].imag() != 0.0 || eig.values[1].imag() != 0.0) {
        throw Error(Errc::InvalidArgument, "deflation needs two real leading eigenvalues");
    }
    DeflationData d;
    d.e1 = head_function(eig.A.col(0), *table);
    d.e2 = head_function(eig.A.col(1), *table);
    d.delta1_hat = eig.values[0].real();
    d.delta2_hat = eig.values[1].real();
    d.dual1.resize(static_cast<std::size_t>(B.cols()));
    d.dual2.resize(static_cast<std::size_t>(B.cols()));
    for (Eigen::Index q = 0; q < B.cols(); ++q) {
        d.dual1[static_cast<std::size_t>(q)] = B(0, q);
        d.dual2[static_cast<std::size_t>(q)] = B(1, q);
    }
    d.table = std::move(table);
    return d;
}

SpectrumReport stable_spectral_radius(const GenFunction& s_star, const RenormSpec& spec,
                                      std::shared_ptr<const BasisTable> table, const SpectrumOptions& opt) {
    const BasisTable& T = *table;
    const Linearization lin(s_star, spec);
    SpectrumReport rep;
    rep.mode = spec.mode;
    rep.N = T.N();
    rep.M = T.M();
    rep.lambda = lin.base().lambda;
    rep.mu = lin.base().mu;
    rep.t = lin.base().t;

    const AssembledMatrix am = assemble(lin, T, T.head_positions(), T.head_positions(), opt.method, opt.fd_step);
    rep.matrix = am.D;
    const EigenDecomposition eig = eigen_decompose(am.D);
    rep.eigenvalues = eig.values;
    rep.A = eig.A;
    rep.B = eig.A.partialPivLu().inverse();
    rep.inverse = inverse_certificate(eig.A, rep.B);
    rep.alpha = equivalence_constant(eig.A);
    const double dn = std::max(l1_norm(am.D), 1e-300);
    rep.eig_residual = l1_norm(am.D * eig.A - eig.A * eig.Lambda) / dn;
    if (eig.values.size() >= 3) {
        rep.delta1 = eig.values[0];
        rep.delta2 = eig.values[1];
        rep.kappa3 = eig.values[2];
    }
    for (double v : am.column_tail) rep.tail_estimate = std::max(rep.tail_estimate, v);
    const TailColumns tc = tail_columns(lin, T, rep.B);
    rep.tail_input_norm = extended_max(tc.rest, tc.grade, T.M() - 1);
    rep.stable_radius = std::abs(rep.kappa3) + rep.tail_estimate;
    if (opt.with_projected_norms) rep.norms = norms_from(lin, T, eig, rep.B, tc);
    return rep;
}

EigenvectorMatch match_eigenvector(const EigenDecomposition& eig, const Eigen::VectorXd& v) {
    EigenvectorMatch best;
    const double vn = v.lpNorm<1>();
    if (!(vn > 0.0)) throw Error(Errc::InvalidArgument, "cannot match the zero vector");
    const Eigen::VectorXd u = v / vn;
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        if (eig.values[k].imag() != 0.0) continue;
        const Eigen::VectorXd a = eig.A.col(static_cast<Eigen::Index>(k)) / eig.A.col(static_cast<Eigen::Index>(k)).lpNorm<1>();
        const double d = std::min((a - u).lpNorm<1>(), (a + u).lpNorm<1>());
        if (best.index < 0 || d < best.distance) best = {static_cast<int>(k), eig.values[k], d};
    }
    return best;
}

Eigen::VectorXd head_vector(const Poly2& p, const BasisTable& table) {
    const std::vector<double> hc = head_coords(expand_in_basis(p.resized(table.M()), table, false), table);
    return Eigen::Map<const Eigen::VectorXd>(hc.data(), static_cast<Eigen::Index>(hc.size()));
}

namespace {

double rel_residual(const Poly2& image, const Poly2& psi, double k) {
    return norm_rho(sub(image, scale(psi, k)).without_tail()) / norm_rho(psi.without_tail());
}

// sum a_ij b_ij rho^(2(i+j))
double weighted_dot(const Poly2& a, const Poly2& b) {
    const int d = std::min(a.degree(), b.degree());
    double out = 0.0, w = 1.0;
    for (int g = 0; g <= d; ++g, w *= a.rho() * a.rho()) {
        for (int j = 0; j <= g; ++j) out += a.get(g - j, j) * b.get(g - j, j) * w;
    }
    return out;
}

}  // namespace

EigenIdentities eigen_identities(const GenFunction& s, double c0) {
    EigenIdentities r;
    const Linearization shifted(s, RenormSpec::shifted(c0));
    r.lambda = shifted.base().lambda;
    r.mu = shifted.base().mu;
    const Linearization frozen(s, RenormSpec::frozen(r.lambda, r.mu));
    const Linearization ekw(s, RenormSpec::ekw());

    const Poly2 psi = psi_vector(s);
    const Poly2 pe = psi_ekw_vector(s);
    const Poly2 pp = psi_ekw_vector_printed(s);
    r.frozen = rel_residual(frozen.apply(psi), psi, r.lambda);
    r.ekw = rel_residual(ekw.apply(pe), pe, r.lambda);
    r.ekw_printed = rel_residual(ekw.apply(pp), pp, r.lambda);

    const Poly2 img = shifted.apply(pe);
    r.shifted_null = rel_residual(img, pe, 0.0);
    r.shifted_rayleigh = weighted_dot(img, pe) / weighted_dot(pe, pe);
    r.shifted_eig_residual = rel_residual(img, pe, r.shifted_rayleigh);
    r.shifted_predicted = r.lambda * c0 / shifted.base().P.get(0, 2);
    return r;
}

}  // namespace pdren
