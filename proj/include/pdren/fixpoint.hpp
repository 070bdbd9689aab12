#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "pdren/basis.hpp"
#include "pdren/genfun.hpp"

namespace pdren {

// Induced l1 operator norm (largest column sum).
double l1_norm(const Eigen::MatrixXd& m);

struct InverseCertificate {
    double delta = 0.0;  // bound on |A^-1 - B0|_1
    double D = 0.0;      // |I - A B0|_1
    double eps = 0.0;    // |A B0 - I|_1
};

// Residuals are accumulated in extended precision.
InverseCertificate inverse_certificate(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B0);

// Two approximate expanding eigenpairs and the dual functionals picking
// out their coordinates from the head basis coefficients.
struct DeflationData {
    Poly2 e1, e2;
    double delta1_hat = 0.0, delta2_hat = 0.0;
    std::vector<double> dual1, dual2;  // over table->head_positions()
    std::shared_ptr<const BasisTable> table;

    bool empty() const noexcept { return table == nullptr; }
    // coordinates of h along e1 and e2
    std::pair<double, double> coords(const Poly2& h) const;
    // M = (I - K)^-1 and I - K, where K = delta1 P1 + delta2 P2
    Poly2 apply_M(const Poly2& h) const;
    Poly2 apply_I_minus_K(const Poly2& h) const;
    Poly2 apply_K(const Poly2& h) const;
};

struct FixedPointOptions {
    int max_iter = 200;
    double tol = 1e-14;
    double ball = 5.79833984375e-4;  // working ball radius for |h|
};

struct FixedPointResult {
    GenFunction s_star;
    RenormOutcome outcome;  // the operator applied at s_star
    Poly2 h;
    int iterations = 0;
    std::vector<double> history;  // |N[h] - h| per iteration
};

FixedPointResult find_fixed_point(const GenFunction& s0, double c0, const DeflationData& defl,
                                  const FixedPointOptions& opt = {}, const Poly2* h_start = nullptr);

struct NewtonStep {
    GenFunction s;
    double residual_before = 0.0;  // |R[s] - s| at the input
};

// One Newton step on the head coefficients (i + j < N_head) with the tail
// updated by the operator itself. N_head = 0 is a plain operator step.
NewtonStep newton_head_step(const GenFunction& s, const RenormSpec& spec, int N_head);
GenFunction newton_head_refine(const GenFunction& s, double c0, int N_head);

struct NewtonRun {
    GenFunction s;
    std::vector<double> residuals;
};
NewtonRun newton_solve(const GenFunction& s, const RenormSpec& spec, int N_head, int max_steps, double tol);

struct Certificate {
    double epsilon = 0.0;      // |N[0]| in the eigenbasis norm
    double epsilon_rho = 0.0;  // same residual in the weighted norm
    double D_bound = 0.0;      // max of the two estimates below
    double D_columns = 0.0;    // largest column norm of (L - K)M over the basis
    double D_sampled = 0.0;    // largest ratio over random points and directions
    double alpha = 1.0;
    double rho_ball = 0.0;
    bool radius_ok = false;
};

struct CertificateOptions {
    double rho_ball = 6.0e-12;
    int n_samples = 8;
    std::uint64_t seed = 20240611;
};

// Columns of (L - K)M expressed in eigenbasis coordinates. Needs the
// eigenvector matrix A (head) and its inverse B.
Certificate contraction_certificate(const GenFunction& s_star, double c0, const DeflationData& defl,
                                    const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, double alpha,
                                    const CertificateOptions& opt = {});

// Norm of h in the eigenbasis: |B head(h)|_1 + |tail(h)|_1 (+ series tail).
double eigenbasis_norm(const Poly2& h, const BasisTable& table, const Eigen::MatrixXd& B);

}  // namespace pdren
