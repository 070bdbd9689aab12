#include "pdren/taylor2.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pdren {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::MismatchedDomain: return "MismatchedDomain";
        case Errc::DomainEscape: return "DomainEscape";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::SingularDenominator: return "SingularDenominator";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::NoRootInWindow: return "NoRootInWindow";
        case Errc::MultipleRootSuspected: return "MultipleRootSuspected";
        case Errc::NotSymmetric: return "NotSymmetric";
        case Errc::NotContractive: return "NotContractive";
        case Errc::Diverged: return "Diverged";
        case Errc::SingularJacobian: return "SingularJacobian";
        case Errc::IterationFailure: return "IterationFailure";
        case Errc::ImplicitSolveFailure: return "ImplicitSolveFailure";
        case Errc::TwistViolation: return "TwistViolation";
        case Errc::OrbitLost: return "OrbitLost";
        case Errc::InsufficientData: return "InsufficientData";
        case Errc::ParseError: return "ParseError";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

namespace {

void require_same_domain(const Poly2& a, const Poly2& b) {
    if (a.rho() != b.rho()) {
        throw Error(Errc::MismatchedDomain,
                    "radii " + std::to_string(a.rho()) + " and " + std::to_string(b.rho()));
    }
}

std::vector<char> nonzero_blocks(const Poly2& a) {
    std::vector<char> nz(static_cast<std::size_t>(a.degree() + 1), 0);
    for (int d = 0; d <= a.degree(); ++d) {
        const double* p = a.block(d);
        for (int j = 0; j <= d; ++j) {
            if (p[j] != 0.0) {
                nz[static_cast<std::size_t>(d)] = 1;
                break;
            }
        }
    }
    return nz;
}

bool is_unit_monomial(const Poly2& a, int i, int j) {
    if (i + j > a.degree() || a.tail() != 0.0) return false;
    const auto c = a.coeffs();
    const std::size_t k = Poly2::index(i, j);
    for (std::size_t n = 0; n < c.size(); ++n) {
        if (c[n] != (n == k ? 1.0 : 0.0)) return false;
    }
    return true;
}

// out += c * x^sx y^sy * src, truncated at out's degree. Returns the
// weighted mass that fell beyond the truncation.
double shift_accumulate(Poly2& out, double c, const Poly2& src, int sx, int sy,
                        const std::vector<double>* suffix) {
    if (c == 0.0) return 0.0;
    const int s = sx + sy;
    const int dmax = std::min(src.degree(), out.degree() - s);
    for (int d = 0; d <= dmax; ++d) {
        const double* p = src.block(d);
        double* o = out.block(d + s) + sy;
        for (int j = 0; j <= d; ++j) o[j] += c * p[j];
    }
    if (dmax >= src.degree()) return 0.0;
    const int first_dropped = std::max(dmax + 1, 0);
    double mass;
    if (suffix != nullptr) {
        mass = (*suffix)[static_cast<std::size_t>(first_dropped)];
    } else {
        mass = 0.0;
        const auto bn = block_norms(src);
        for (int d = first_dropped; d <= src.degree(); ++d) mass += bn[static_cast<std::size_t>(d)];
    }
    return std::abs(c) * std::pow(out.rho(), s) * mass;
}

std::vector<double> suffix_sums(const Poly2& a) {
    const auto bn = block_norms(a);
    std::vector<double> suf(bn.size() + 1, 0.0);
    for (int d = static_cast<int>(bn.size()) - 1; d >= 0; --d) {
        suf[static_cast<std::size_t>(d)] = suf[static_cast<std::size_t>(d) + 1] + bn[static_cast<std::size_t>(d)];
    }
    return suf;
}

double univariate_norm(std::span<const double> u, double rho) {
    double n = 0.0, r = 1.0;
    for (double c : u) {
        n += std::abs(c) * r;
        r *= rho;
    }
    return n;
}

}  // namespace

Poly2::Poly2(int deg, double rho) : deg_(deg), rho_(rho) {
    if (deg < 0) throw Error(Errc::InvalidArgument, "negative degree");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(Errc::InvalidArgument, "radius must be positive");
    c_.assign(size_for(deg), 0.0);
}

Poly2 Poly2::constant(double c, int deg, double rho) {
    Poly2 p(deg, rho);
    p.c_[0] = c;
    return p;
}

Poly2 Poly2::monomial(int i, int j, double c, int deg, double rho) {
    Poly2 p(deg, rho);
    p.set(i, j, c);
    return p;
}

double Poly2::coeff(int i, int j) const {
    if (i < 0 || j < 0 || i + j > deg_) {
        throw Error(Errc::OutOfRange, "coefficient (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    return c_[index(i, j)];
}

double Poly2::get(int i, int j) const noexcept {
    if (i < 0 || j < 0 || i + j > deg_) return 0.0;
    return c_[index(i, j)];
}

void Poly2::set(int i, int j, double c) {
    if (i < 0 || j < 0 || i + j > deg_) {
        throw Error(Errc::OutOfRange, "coefficient (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    c_[index(i, j)] = c;
}

void Poly2::add_to(int i, int j, double c) {
    if (i < 0 || j < 0 || i + j > deg_) {
        throw Error(Errc::OutOfRange, "coefficient (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    c_[index(i, j)] += c;
}

void Poly2::set_tail(double t) {
    if (!(t >= 0.0)) throw Error(Errc::InvalidArgument, "tail must be nonnegative");
    tail_ = t;
}

Poly2 Poly2::with_tail(double t) const {
    Poly2 p = *this;
    p.set_tail(t);
    return p;
}

Poly2 Poly2::resized(int deg) const {
    Poly2 p(deg, rho_);
    const std::size_t n = std::min(c_.size(), p.c_.size());
    std::copy_n(c_.begin(), n, p.c_.begin());
    double dropped = 0.0;
    for (int d = deg + 1; d <= deg_; ++d) {
        const double* b = block(d);
        double s = 0.0;
        for (int j = 0; j <= d; ++j) s += std::abs(b[j]);
        dropped += s * std::pow(rho_, d);
    }
    p.tail_ = tail_ + dropped;
    return p;
}

bool Poly2::is_zero() const noexcept {
    return tail_ == 0.0 && std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
}

bool Poly2::all_finite() const noexcept {
    return std::isfinite(tail_) && std::all_of(c_.begin(), c_.end(), [](double v) { return std::isfinite(v); });
}

Poly2 axpy(const Poly2& a, double k, const Poly2& b) {
    require_same_domain(a, b);
    Poly2 out = a.degree() >= b.degree() ? a : a.resized(b.degree());
    auto oc = out.coeffs();
    const auto bc = b.coeffs();
    const std::size_t n = std::min(oc.size(), bc.size());
    for (std::size_t i = 0; i < n; ++i) oc[i] += k * bc[i];
    out.set_tail(a.tail() + std::abs(k) * b.tail());
    return out;
}

Poly2 add(const Poly2& a, const Poly2& b) { return axpy(a, 1.0, b); }
Poly2 sub(const Poly2& a, const Poly2& b) { return axpy(a, -1.0, b); }

Poly2 scale(const Poly2& a, double k) {
    Poly2 out = a;
    for (double& v : out.coeffs()) v *= k;
    out.set_tail(std::abs(k) * a.tail());
    return out;
}

std::vector<double> block_norms(const Poly2& a) {
    std::vector<double> bn(static_cast<std::size_t>(a.degree() + 1), 0.0);
    double r = 1.0;
    for (int d = 0; d <= a.degree(); ++d) {
        const double* p = a.block(d);
        double s = 0.0;
        for (int j = 0; j <= d; ++j) s += std::abs(p[j]);
        bn[static_cast<std::size_t>(d)] = s * r;
        r *= a.rho();
    }
    return bn;
}

double norm_rho(const Poly2& a) {
    double n = a.tail();
    for (double b : block_norms(a)) n += b;
    return n;
}

double coeff(const Poly2& a, int i, int j) { return a.coeff(i, j); }

Poly2 mul(const Poly2& a, const Poly2& b) {
    require_same_domain(a, b);
    const int D = std::max(a.degree(), b.degree());
    Poly2 out(D, a.rho());
    const auto nza = nonzero_blocks(a);
    const auto nzb = nonzero_blocks(b);
    for (int da = 0; da <= a.degree(); ++da) {
        if (!nza[static_cast<std::size_t>(da)]) continue;
        const double* pa = a.block(da);
        const int dbmax = std::min(b.degree(), D - da);
        for (int db = 0; db <= dbmax; ++db) {
            if (!nzb[static_cast<std::size_t>(db)]) continue;
            const double* pb = b.block(db);
            double* o = out.block(da + db);
            for (int ja = 0; ja <= da; ++ja) {
                const double av = pa[ja];
                if (av == 0.0) continue;
                double* oo = o + ja;
                for (int jb = 0; jb <= db; ++jb) oo[jb] += av * pb[jb];
            }
        }
    }
    const auto An = block_norms(a);
    const auto Bn = block_norms(b);
    double dropped = 0.0;
    for (int da = 0; da <= a.degree(); ++da) {
        for (int db = std::max(0, D - da + 1); db <= b.degree(); ++db) {
            dropped += An[static_cast<std::size_t>(da)] * Bn[static_cast<std::size_t>(db)];
        }
    }
    double tail = dropped;
    if (a.tail() != 0.0) tail += a.tail() * norm_rho(b);
    if (b.tail() != 0.0) tail += norm_rho(a) * b.tail();
    out.set_tail(tail);
    return out;
}

Poly2 divide(const Poly2& a, const Poly2& b) {
    require_same_domain(a, b);
    const double b00 = b.get(0, 0);
    if (b00 == 0.0 || !std::isfinite(1.0 / b00)) {
        throw Error(Errc::SingularDenominator, "series divisor has zero constant term");
    }
    const int D = std::max(a.degree(), b.degree());
    Poly2 q(D, a.rho());
    std::vector<double> tmp(static_cast<std::size_t>(D + 1));
    for (int d = 0; d <= D; ++d) {
        std::fill(tmp.begin(), tmp.begin() + d + 1, 0.0);
        if (d <= a.degree()) std::copy_n(a.block(d), d + 1, tmp.begin());
        for (int e = 1; e <= std::min(d, b.degree()); ++e) {
            const double* pb = b.block(e);
            const double* pq = q.block(d - e);
            for (int jb = 0; jb <= e; ++jb) {
                const double bv = pb[jb];
                if (bv == 0.0) continue;
                for (int jq = 0; jq <= d - e; ++jq) tmp[static_cast<std::size_t>(jb + jq)] -= bv * pq[jq];
            }
        }
        double* out = q.block(d);
        for (int j = 0; j <= d; ++j) out[j] = tmp[static_cast<std::size_t>(j)] / b00;
    }
    // First-order estimate only; a rigorous bound needs a Neumann series.
    if (a.tail() != 0.0 || b.tail() != 0.0) {
        q.set_tail((a.tail() + norm_rho(q) * b.tail()) / std::abs(b00));
    }
    return q;
}

Poly2 partial(const Poly2& a, int axis) {
    if (axis != 1 && axis != 2) throw Error(Errc::InvalidArgument, "axis must be 1 or 2");
    if (a.degree() < 1) throw Error(Errc::InvalidArgument, "partial needs degree >= 1");
    const int D = a.degree() - 1;
    Poly2 out(D, a.rho());
    for (int d = 0; d <= D; ++d) {
        double* o = out.block(d);
        const double* p = a.block(d + 1);
        for (int j = 0; j <= d; ++j) {
            const int i = d - j;
            o[j] = axis == 1 ? (i + 1) * p[j] : (j + 1) * p[j + 1];
        }
    }
    if (a.tail() != 0.0) out.set_tail((a.degree() + 1) / a.rho() * a.tail());
    return out;
}

Poly2 shift(const Poly2& a, int sx, int sy) {
    Poly2 out(a.degree(), a.rho());
    const double dropped = shift_accumulate(out, 1.0, a, sx, sy, nullptr);
    out.set_tail(a.tail() * std::pow(a.rho(), sx + sy) + dropped);
    return out;
}

Poly2 euler(const Poly2& a) {
    Poly2 out = a;
    for (int d = 0; d <= a.degree(); ++d) {
        double* p = out.block(d);
        for (int j = 0; j <= d; ++j) p[j] *= d;
    }
    if (a.tail() != 0.0) out.set_tail((a.degree() + 1) * a.tail());
    return out;
}

Poly2 swap_args(const Poly2& a) {
    Poly2 out(a.degree(), a.rho());
    for (int d = 0; d <= a.degree(); ++d) {
        const double* p = a.block(d);
        double* o = out.block(d);
        for (int j = 0; j <= d; ++j) o[d - j] = p[j];
    }
    out.set_tail(a.tail());
    return out;
}

Poly2 scale_args(const Poly2& a, double k, double new_rho) {
    if (std::abs(k) * new_rho > a.rho() * (1.0 + 1e-15)) {
        throw Error(Errc::DomainEscape, "scaled disk leaves the domain of the series");
    }
    Poly2 out(a.degree(), new_rho);
    double kd = 1.0;
    for (int d = 0; d <= a.degree(); ++d) {
        const double* p = a.block(d);
        double* o = out.block(d);
        for (int j = 0; j <= d; ++j) o[j] = p[j] * kd;
        kd *= k;
    }
    out.set_tail(a.tail());
    return out;
}

std::complex<double> eval(const Poly2& a, std::complex<double> x, std::complex<double> y) {
    // Horner in x over rows of fixed y-exponent j.
    std::complex<double> acc_y = 0.0;
    for (int j = a.degree(); j >= 0; --j) {
        std::complex<double> row = 0.0;
        for (int i = a.degree() - j; i >= 0; --i) row = row * x + a.block(i + j)[j];
        acc_y = acc_y * y + row;
    }
    return acc_y;
}

double eval(const Poly2& a, double x, double y) {
    double acc_y = 0.0;
    for (int j = a.degree(); j >= 0; --j) {
        double row = 0.0;
        for (int i = a.degree() - j; i >= 0; --i) row = row * x + a.block(i + j)[j];
        acc_y = acc_y * y + row;
    }
    return acc_y;
}

Poly2 compose2(const Poly2& s, const Poly2& u, const Poly2& v) {
    require_same_domain(u, v);
    const double nu = norm_rho(u), nv = norm_rho(v);
    if (nu > s.rho() || nv > s.rho()) {
        throw Error(Errc::DomainEscape, "composition image leaves the domain of the outer series");
    }
    const int D = std::max(u.degree(), v.degree());
    const double r = u.rho();
    const Poly2 uu = u.resized(D), vv = v.resized(D);
    const bool v_is_y = is_unit_monomial(vv, 0, 1);
    const bool u_is_x = is_unit_monomial(uu, 1, 0);

    std::vector<Poly2> vpow;
    if (!v_is_y) {
        vpow.reserve(static_cast<std::size_t>(s.degree() + 1));
        vpow.push_back(Poly2::constant(1.0, D, r));
        for (int b = 1; b <= s.degree(); ++b) vpow.push_back(mul(vpow.back(), vv));
    }
    // w_a = sum_b c_ab v^b
    auto row = [&](int a) {
        Poly2 w(D, r);
        double dropped = 0.0;
        for (int b = 0; a + b <= s.degree(); ++b) {
            const double c = s.block(a + b)[b];
            if (c == 0.0) continue;
            if (v_is_y) {
                if (b <= D) w.add_to(0, b, c);
                else dropped += std::abs(c) * std::pow(r, b);
            } else {
                w = axpy(w, c, vpow[static_cast<std::size_t>(b)]);
            }
        }
        w.set_tail(w.tail() + dropped);
        return w;
    };
    Poly2 acc = row(s.degree());
    for (int a = s.degree() - 1; a >= 0; --a) {
        acc = u_is_x ? shift(acc, 1, 0) : mul(acc, uu);
        acc = add(acc, row(a));
    }
    acc.set_tail(acc.tail() + s.tail());
    return acc;
}

Poly2 compose_separable(const Poly2& s, std::span<const double> u, std::span<const double> v,
                        int deg, double rho) {
    if (univariate_norm(u, rho) > s.rho() || univariate_norm(v, rho) > s.rho()) {
        throw Error(Errc::DomainEscape, "separable substitution leaves the domain of the outer series");
    }
    const int S = s.degree();
    // Univariate powers kept to degree 2*deg; mass beyond that goes to a tail.
    const int L = 2 * deg;
    auto powers = [&](std::span<const double> w) {
        std::vector<std::vector<double>> pw(static_cast<std::size_t>(S + 1));
        std::vector<double> extra(static_cast<std::size_t>(S + 1), 0.0);
        pw[0].assign(static_cast<std::size_t>(L + 1), 0.0);
        pw[0][0] = 1.0;
        for (int k = 1; k <= S; ++k) {
            auto& cur = pw[static_cast<std::size_t>(k)];
            const auto& prev = pw[static_cast<std::size_t>(k - 1)];
            cur.assign(static_cast<std::size_t>(L + 1), 0.0);
            double lost = 0.0;
            for (int i = 0; i <= L; ++i) {
                const double pv = prev[static_cast<std::size_t>(i)];
                if (pv == 0.0) continue;
                for (int m = 0; m < static_cast<int>(w.size()); ++m) {
                    const double t = pv * w[static_cast<std::size_t>(m)];
                    if (i + m <= L) cur[static_cast<std::size_t>(i + m)] += t;
                    else lost += std::abs(t) * std::pow(rho, i + m);
                }
            }
            extra[static_cast<std::size_t>(k)] =
                lost + extra[static_cast<std::size_t>(k - 1)] * univariate_norm(w, rho);
        }
        return std::make_pair(pw, extra);
    };
    const auto [U, Ut] = powers(u);
    const auto [V, Vt] = powers(v);

    std::vector<double> rpow(static_cast<std::size_t>(L + 1));
    rpow[0] = 1.0;
    for (int i = 1; i <= L; ++i) rpow[static_cast<std::size_t>(i)] = rpow[static_cast<std::size_t>(i - 1)] * rho;

    Poly2 out(deg, rho);
    double tail = s.tail();
    std::vector<double> W(static_cast<std::size_t>(L + 1));
    for (int a = 0; a <= S; ++a) {
        std::fill(W.begin(), W.end(), 0.0);
        double wt = 0.0;
        bool any = false;
        for (int b = 0; a + b <= S; ++b) {
            const double c = s.block(a + b)[b];
            if (c == 0.0) continue;
            any = true;
            const auto& Vb = V[static_cast<std::size_t>(b)];
            for (int l = 0; l <= L; ++l) W[static_cast<std::size_t>(l)] += c * Vb[static_cast<std::size_t>(l)];
            wt += std::abs(c) * Vt[static_cast<std::size_t>(b)];
        }
        if (!any) continue;
        const auto& Ua = U[static_cast<std::size_t>(a)];
        double ua_norm = Ut[static_cast<std::size_t>(a)], w_norm = wt;
        for (int k = 0; k <= L; ++k) ua_norm += std::abs(Ua[static_cast<std::size_t>(k)]) * rpow[static_cast<std::size_t>(k)];
        for (int l = 0; l <= L; ++l) w_norm += std::abs(W[static_cast<std::size_t>(l)]) * rpow[static_cast<std::size_t>(l)];
        double kept = 0.0;
        for (int k = 0; k <= deg; ++k) {
            const double uk = Ua[static_cast<std::size_t>(k)];
            if (uk == 0.0) continue;
            for (int l = 0; k + l <= deg; ++l) {
                const double t = uk * W[static_cast<std::size_t>(l)];
                out.block(k + l)[l] += t;
                kept += std::abs(t) * rpow[static_cast<std::size_t>(k + l)];
            }
        }
        tail += std::max(0.0, ua_norm * w_norm - kept);
    }
    out.set_tail(tail);
    return out;
}

double symmetry_defect(const Poly2& a) {
    double worst = 0.0;
    // table T(p,q) = (p+1) c_{p+1,q}; compare T(p,q) with T(q,p)
    for (int p = 0; p < a.degree(); ++p) {
        for (int q = p + 1; p + q + 1 <= a.degree(); ++q) {
            const double t1 = (p + 1) * a.get(p + 1, q);
            const double t2 = (q + 1) * a.get(q + 1, p);
            worst = std::max(worst, std::abs(t1 - t2));
        }
    }
    return worst;
}

double symmetry_tolerance(const Poly2& a) { return 1e-11 * norm_rho(a); }

bool is_symmetric(const Poly2& a) { return symmetry_defect(a) <= symmetry_tolerance(a); }

SymmetrizeResult symmetrize(const Poly2& a) {
    Poly2 out = a;
    double drift = 0.0;
    // pairs (i+1, j) and (j+1, i) with 0 <= i < j: line (1, r), r = (i+1)/(j+1)
    for (int i = 0; i < a.degree(); ++i) {
        for (int j = i + 1; i + j + 1 <= a.degree(); ++j) {
            const double r = static_cast<double>(i + 1) / (j + 1);
            const double c1 = a.get(i + 1, j), c2 = a.get(j + 1, i);
            const double t = (c1 + r * c2) / (1.0 + r * r);
            out.set(i + 1, j, t);
            out.set(j + 1, i, r * t);
            drift += (std::abs(c1 - t) + std::abs(c2 - r * t)) * std::pow(a.rho(), i + j + 1);
        }
    }
    return {std::move(out), drift};
}

Poly2 symmetrize_swap(const Poly2& a) {
    Poly2 out = a;
    for (int d = 0; d <= a.degree(); ++d) {
        double* p = out.block(d);
        for (int j = 0; 2 * j < d; ++j) {
            const double m = 0.5 * (p[j] + p[d - j]);
            p[j] = m;
            p[d - j] = m;
        }
    }
    return out;
}

PowerCache::PowerCache(const Poly2& w, int n) {
    pow_.reserve(static_cast<std::size_t>(n + 1));
    pow_.push_back(Poly2::constant(1.0, w.degree(), w.rho()));
    for (int k = 1; k <= n; ++k) pow_.push_back(k == 1 ? w : mul(pow_.back(), w));
    suffix_.reserve(pow_.size());
    for (const auto& p : pow_) suffix_.push_back(suffix_sums(p));
}

Poly2 PowerCache::subst(const Poly2& q, int slot) const {
    if (pow_.size() < 2) throw Error(Errc::InvalidArgument, "empty power cache");
    const Poly2& w = pow_[1];
    if (norm_rho(w) > q.rho()) throw Error(Errc::DomainEscape, "substituted series leaves the domain");
    if (q.degree() >= size()) throw Error(Errc::InvalidArgument, "power cache too short");
    const double r = w.rho();
    Poly2 out(w.degree(), r);
    double tail = q.tail();
    for (int d = 0; d <= q.degree(); ++d) {
        const double* p = q.block(d);
        for (int j = 0; j <= d; ++j) {
            const double c = p[j];
            if (c == 0.0) continue;
            const int i = d - j;
            // slot 0: x^i w^j, slot 1: y^i w^j, slot 2: w^i y^j
            const int k = slot == 2 ? i : j;
            const int sx = slot == 0 ? i : 0;
            const int sy = slot == 1 ? i : (slot == 2 ? j : 0);
            const Poly2& pk = pow_[static_cast<std::size_t>(k)];
            tail += shift_accumulate(out, c, pk, sx, sy, &suffix_[static_cast<std::size_t>(k)]);
            if (pk.tail() != 0.0) tail += std::abs(c) * std::pow(r, sx + sy) * pk.tail();
        }
    }
    out.set_tail(tail);
    return out;
}

Poly2 PowerCache::subst_x_w(const Poly2& q) const { return subst(q, 0); }
Poly2 PowerCache::subst_y_w(const Poly2& q) const { return subst(q, 1); }
Poly2 PowerCache::subst_w_y(const Poly2& q) const { return subst(q, 2); }

void write_series(std::ostream& os, const Poly2& a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "rho=%.17g deg=%d tail=%.17g\n", a.rho(), a.degree(), a.tail());
    os << buf;
    for (int d = 0; d <= a.degree(); ++d) {
        const double* p = a.block(d);
        for (int j = 0; j <= d; ++j) {
            if (p[j] == 0.0) continue;
            std::snprintf(buf, sizeof buf, "%d %d %.17e\n", d - j, j, p[j]);
            os << buf;
        }
    }
}

Poly2 read_series(std::istream& is) {
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& why) -> Error {
        return Error(Errc::ParseError, "line " + std::to_string(lineno) + ": " + why);
    };
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line[pos] == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_line()) throw fail("missing header");
    double rho = 0.0, tail = 0.0;
    int deg = -1;
    {
        std::istringstream hs(line);
        std::string tok;
        bool have_rho = false, have_deg = false, have_tail = false;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) throw fail("bad header token '" + tok + "'");
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            try {
                std::size_t used = 0;
                if (key == "rho") {
                    rho = std::stod(val, &used);
                    have_rho = true;
                } else if (key == "deg") {
                    deg = std::stoi(val, &used);
                    have_deg = true;
                } else if (key == "tail") {
                    tail = std::stod(val, &used);
                    have_tail = true;
                } else {
                    throw fail("unknown header key '" + key + "'");
                }
                if (used != val.size()) throw fail("trailing characters in '" + tok + "'");
            } catch (const std::logic_error&) {
                throw fail("bad number in '" + tok + "'");
            }
        }
        if (!have_rho || !have_deg || !have_tail) throw fail("header needs rho, deg and tail");
        if (!(rho > 0.0) || !std::isfinite(rho) || deg < 0 || deg > 4096 || !(tail >= 0.0) || !std::isfinite(tail)) {
            throw fail("header values out of range");
        }
    }
    Poly2 p(deg, rho);
    p.set_tail(tail);
    while (next_line()) {
        std::istringstream ls(line);
        long long i = -1, j = -1;
        std::string cs, extra;
        if (!(ls >> i >> j >> cs) || (ls >> extra)) throw fail("expected 'i j c'");
        double c = 0.0;
        try {
            std::size_t used = 0;
            c = std::stod(cs, &used);
            if (used != cs.size()) throw fail("bad coefficient '" + cs + "'");
        } catch (const std::logic_error&) {
            throw fail("bad coefficient '" + cs + "'");
        }
        if (!std::isfinite(c)) throw fail("non-finite coefficient");
        if (i < 0 || j < 0 || i + j > deg) throw fail("exponent outside the table");
        p.set(static_cast<int>(i), static_cast<int>(j), c);
    }
    return p;
}

void save_series(const std::string& path, const Poly2& a) {
    std::ofstream os(path);
    if (!os) throw Error(Errc::InvalidArgument, "cannot write " + path);
    write_series(os, a);
    if (!os) throw Error(Errc::InvalidArgument, "write failed for " + path);
}

Poly2 load_series(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(Errc::ParseError, "cannot open " + path);
    return read_series(is);
}

}  // namespace pdren
