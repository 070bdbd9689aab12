#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pdren/error.hpp"

namespace pdren {

// Truncated bivariate Taylor series sum c_ij x^i y^j, i+j <= deg, on the
// bi-disk of radius rho. Coefficients are stored by total degree; inside a
// degree block the y exponent runs upward. `tail` is an l1 bound on what
// was dropped during truncation.
class Poly2 {
public:
    Poly2() : Poly2(0, 1.0) {}
    Poly2(int deg, double rho);

    static Poly2 constant(double c, int deg, double rho);
    static Poly2 monomial(int i, int j, double c, int deg, double rho);
    static Poly2 x(int deg, double rho) { return monomial(1, 0, 1.0, deg, rho); }
    static Poly2 y(int deg, double rho) { return monomial(0, 1, 1.0, deg, rho); }

    static constexpr std::size_t index(int i, int j) noexcept {
        const std::size_t d = static_cast<std::size_t>(i + j);
        return d * (d + 1) / 2 + static_cast<std::size_t>(j);
    }
    static constexpr std::size_t block_offset(int d) noexcept {
        return static_cast<std::size_t>(d) * static_cast<std::size_t>(d + 1) / 2;
    }
    static constexpr std::size_t size_for(int deg) noexcept { return block_offset(deg + 1); }

    int degree() const noexcept { return deg_; }
    double rho() const noexcept { return rho_; }
    double tail() const noexcept { return tail_; }

    // Throws OutOfRange for negative exponents or i+j > degree().
    double coeff(int i, int j) const;
    // Same as coeff but returns 0 outside the table.
    double get(int i, int j) const noexcept;
    void set(int i, int j, double c);
    void add_to(int i, int j, double c);
    void set_tail(double t);

    std::span<const double> coeffs() const noexcept { return c_; }
    std::span<double> coeffs() noexcept { return c_; }
    const double* block(int d) const noexcept { return c_.data() + block_offset(d); }
    double* block(int d) noexcept { return c_.data() + block_offset(d); }

    Poly2 with_tail(double t) const;
    Poly2 without_tail() const { return with_tail(0.0); }
    // Same coefficients, new truncation degree (drops or zero-pads).
    Poly2 resized(int deg) const;

    bool is_zero() const noexcept;
    bool all_finite() const noexcept;

private:
    int deg_;
    double rho_;
    double tail_ = 0.0;
    std::vector<double> c_;
};

Poly2 add(const Poly2& a, const Poly2& b);
Poly2 sub(const Poly2& a, const Poly2& b);
Poly2 scale(const Poly2& a, double k);
// a + k*b
Poly2 axpy(const Poly2& a, double k, const Poly2& b);
Poly2 mul(const Poly2& a, const Poly2& b);
// Series quotient a/b truncated at max degree; b must have b(0,0) != 0.
Poly2 divide(const Poly2& a, const Poly2& b);
Poly2 partial(const Poly2& a, int axis);

// Multiplication by x^sx y^sy, truncated.
Poly2 shift(const Poly2& a, int sx, int sy);
// (x d/dx + y d/dy) a
Poly2 euler(const Poly2& a);
// a(y, x)
Poly2 swap_args(const Poly2& a);
// a(k x, k y) on radius new_rho; requires |k| new_rho <= a.rho().
Poly2 scale_args(const Poly2& a, double k, double new_rho);

std::complex<double> eval(const Poly2& a, std::complex<double> x, std::complex<double> y);
double eval(const Poly2& a, double x, double y);

// s(u, v). u and v share a radius, which becomes the radius of the result.
Poly2 compose2(const Poly2& s, const Poly2& u, const Poly2& v);

// s(u(x), v(y)) for univariate u, v given by coefficient lists, on radius rho.
Poly2 compose_separable(const Poly2& s, std::span<const double> u, std::span<const double> v,
                        int deg, double rho);

double norm_rho(const Poly2& a);
double coeff(const Poly2& a, int i, int j);

// Per-degree weighted block norms sum_j |c_{d-j,j}| rho^d.
std::vector<double> block_norms(const Poly2& a);

// max |(i+1)c_{i+1,j} - (j+1)c_{j+1,i}| over the table of d/dx.
double symmetry_defect(const Poly2& a);
double symmetry_tolerance(const Poly2& a);
bool is_symmetric(const Poly2& a);

struct SymmetrizeResult {
    Poly2 poly;
    double drift;  // weighted l1 distance moved
};
// Orthogonal projection onto the coefficient subspace of generating
// functions with s_1(x,y) = s_1(y,x).
SymmetrizeResult symmetrize(const Poly2& a);

// Symmetric in the plain sense a(x,y) = a(y,x).
Poly2 symmetrize_swap(const Poly2& a);

// Powers w^0..w^n of a fixed series, reused by the substitution kernels.
class PowerCache {
public:
    PowerCache() = default;
    PowerCache(const Poly2& w, int n);

    int size() const noexcept { return static_cast<int>(pow_.size()); }
    const Poly2& operator[](int k) const { return pow_.at(static_cast<std::size_t>(k)); }
    const Poly2& base() const { return pow_.at(1); }

    // q(x, w), q(y, w) and q(w, y). Requires norm(w) <= q.rho().
    Poly2 subst_x_w(const Poly2& q) const;
    Poly2 subst_y_w(const Poly2& q) const;
    Poly2 subst_w_y(const Poly2& q) const;

private:
    Poly2 subst(const Poly2& q, int slot) const;
    std::vector<Poly2> pow_;
    // suffix_[k][d]: weighted mass of pow_[k] in degrees >= d
    std::vector<std::vector<double>> suffix_;
};

// Text format: "rho=<r> deg=<d> tail=<t>" followed by "i j c" lines.
void write_series(std::ostream& os, const Poly2& a);
Poly2 read_series(std::istream& is);
void save_series(const std::string& path, const Poly2& a);
Poly2 load_series(const std::string& path);

}  // namespace pdren
