#pragma once

#include "pdren/taylor2.hpp"

namespace pdren {

inline constexpr double kRho = 1.75;
// Radius carrying Z and s(Z, y).
inline constexpr double kMidRadius = 0.51853174082497335;
inline constexpr double kLambdaLo = -0.27569580078125;
inline constexpr double kLambdaHi = -0.222587585449219;
inline constexpr double kLambdaStart = -0.2489;
inline constexpr double kMuLo = 0.0000253506004810333;
inline constexpr double kMuHi = 0.121036529541016;
inline constexpr double kTauSing = 1e-8;
// Relative drift allowed before the output projection onto the symmetric space.
inline constexpr double kSymDriftMax = 1e-11;

// A generating function. When `symmetric` is set the series passed the
// test s_1(x,y) = s_1(y,x) at construction.
class GenFunction {
public:
    GenFunction() = default;
    // Throws NotSymmetric when check is set and the test fails.
    explicit GenFunction(Poly2 p, bool check = true);
    static GenFunction unchecked(Poly2 p);

    const Poly2& poly() const noexcept { return poly_; }
    bool symmetric() const noexcept { return symmetric_; }
    double rho() const noexcept { return poly_.rho(); }
    int degree() const noexcept { return poly_.degree(); }

private:
    Poly2 poly_;
    bool symmetric_ = false;
};

struct MidpointOptions {
    double tol_rel = 1e-13;
    int max_iter = 50;
    double radius = kMidRadius;
};

struct MidpointSolution {
    Poly2 Z;
    double residual = 0.0;
    int iterations = 0;
    PowerCache powers;  // Z^0..Z^D on the midpoint radius
};

MidpointSolution solve_midpoint(const GenFunction& s, const MidpointOptions& opt = {});

// s(Z(x,y), y)
Poly2 prerenorm(const GenFunction& s);
Poly2 prerenorm(const GenFunction& s, const MidpointSolution& mid);

double scaling_lambda(const Poly2& P);
double scaling_mu(const Poly2& P, double lambda);

// t_c = (c - P_03) / (4 P_02) for P = s(Z, y).
double t_shift(const GenFunction& s, double c);
double t_shift(const Poly2& P, double c);
// (1 + 2ty) P(x + t x^2, y + t y^2) on radius rQ.
Poly2 shifted_prerenorm(const Poly2& P, double t, double rQ);
// Radius carrying the shifted series: |lambda window end| * rho, so that
// every admissible lambda maps the rho-disk into it.
double shifted_radius(double rho);

// The (0,3) coefficient of s(Z, y); its value at s0 is the normalization c0.
double normalization_coefficient(const GenFunction& s);

enum class RenormMode { Ekw, Shifted, Frozen };

struct RenormSpec {
    RenormMode mode = RenormMode::Shifted;
    double c = 0.0;
    double lambda_star = 0.0;
    double mu_star = 0.0;

    static RenormSpec ekw() { return {RenormMode::Ekw, 0.0, 0.0, 0.0}; }
    static RenormSpec shifted(double c) { return {RenormMode::Shifted, c, 0.0, 0.0}; }
    static RenormSpec frozen(double lam, double mu) { return {RenormMode::Frozen, 0.0, lam, mu}; }
};

struct RenormOutcome {
    GenFunction s_out;
    double lambda = 0.0;
    double mu = 0.0;
    double t = 0.0;
    Poly2 Z;
    Poly2 P;  // s(Z, y)
    Poly2 Q;  // shifted P; equals P when t = 0 is forced
    double midpoint_residual = 0.0;
    double symmetry_drift = 0.0;  // relative, before projection
};

RenormOutcome apply_renorm(const GenFunction& s, const RenormSpec& spec);
RenormOutcome renorm_ekw(const GenFunction& s);
RenormOutcome renorm_c(const GenFunction& s, double c);
Poly2 renorm_star(const GenFunction& s, double lambda_star, double mu_star);

// Derivative of one renormalization operator at a fixed base point. The
// constructor does all work that does not depend on the direction, so
// apply() is cheap and safe to call concurrently.
class Linearization {
public:
    Linearization(const GenFunction& s, const RenormSpec& spec);
    // Only dZ and dP are available; no renormalized base point is formed.
    static Linearization prerenorm_only(const GenFunction& s);

    const RenormOutcome& base() const noexcept { return base_; }
    const RenormSpec& spec() const noexcept { return spec_; }

    Poly2 dZ(const Poly2& psi) const;
    Poly2 dP(const Poly2& psi) const;
    Poly2 apply(const Poly2& psi) const;
    // Central difference of the operator itself, step h along psi/|psi|.
    Poly2 apply_fd(const Poly2& psi, double h = 1e-6) const;

private:
    struct PrerenormTag {};
    Linearization(const GenFunction& s, PrerenormTag);

    GenFunction s_;
    RenormSpec spec_;
    bool prerenorm_only_ = false;
    RenormOutcome base_;
    MidpointSolution mid_;
    Poly2 inv_den_;   // 1/(s_2(x,Z) + s_2(y,Z))
    Poly2 s1_at_Zy_;  // s_1(Z, y)
    // shifted mode
    Poly2 shift_factor_;  // 1 + 2ty on the shifted radius
    Poly2 dq_dt_;         // d/dt of (1+2ty) P(xi_t)
    double q1_ = 0.0, q11_ = 0.0;  // dQ/dx, d2Q/dx2 at (lambda, 0)
    Poly2 R_euler_;       // (x d/dx + y d/dy) R
};

Poly2 dprerenorm(const GenFunction& s, const Poly2& psi);
Poly2 drenorm_c(const GenFunction& s, const Poly2& psi, double c);

// s_1 x^2 + s_2 y^2 + 2 s y
Poly2 psi_vector(const GenFunction& s);
// psi_vector(s) - s - (s_1 x + s_2 y), the eigenvector of the unshifted
// derivative for lambda. The printed form with +s is kept for comparison.
Poly2 psi_ekw_vector(const GenFunction& s);
Poly2 psi_ekw_vector_printed(const GenFunction& s);

}  // namespace pdren
