#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pdren/basis.hpp"
#include "pdren/fixpoint.hpp"
#include "pdren/genfun.hpp"

namespace pdren {

// Runs fn(0..n-1) on the available hardware threads.
void parallel_for(int n, const std::function<void(int)>& fn);

struct AssembledMatrix {
    Eigen::MatrixXd D;             // rows over row_positions, columns over col_positions
    std::vector<int> row_positions;
    std::vector<int> col_positions;
    std::vector<double> column_tail;  // l1 mass of each image outside the rows, incl. series tail
};

enum class AssemblyMethod { Exact, FiniteDifference };

AssembledMatrix assemble(const Linearization& lin, const BasisTable& table, std::span<const int> rows,
                         std::span<const int> cols, AssemblyMethod method = AssemblyMethod::Exact,
                         double fd_step = 1e-6);

// Head block (i + j < N_head) of the derivative of the shifted operator.
Eigen::MatrixXd assemble_matrix(const GenFunction& s, double c0, const BasisTable& table, int N_head);

struct EigenDecomposition {
    std::vector<std::complex<double>> values;  // sorted by modulus, then real, then imag, descending
    Eigen::MatrixXd A;       // unit-l1 real columns; a complex pair occupies (Re, Im)
    Eigen::MatrixXd Lambda;  // real block diagonal with D A = A Lambda
};

EigenDecomposition eigen_decompose(const Eigen::MatrixXd& D);

// max(sum_i max_k |A_ik|, 1)
double equivalence_constant(const Eigen::MatrixXd& A);

struct ProjectedNorms {
    double P2_L_e1 = 0.0;
    double P1_L_e2 = 0.0;
    double Prest_L_e1 = 0.0;
    double Prest_L_e2 = 0.0;
    double P1_L_Prest = 0.0;
    double P2_L_Prest = 0.0;
    double P1_L_e1 = 0.0;  // consistency value, should reproduce delta1
    double P2_L_e2 = 0.0;
};

// Distance ratio rho/rho' used to extend tail column bounds past degree M.
inline constexpr double kCompactnessRatio = 1.0 / 1.0699996948242188;

ProjectedNorms projected_norms(const Linearization& lin, const BasisTable& table, const EigenDecomposition& eig,
                               const Eigen::MatrixXd& B);

DeflationData deflation_from(const EigenDecomposition& eig, const Eigen::MatrixXd& B,
                             std::shared_ptr<const BasisTable> table);

struct SpectrumOptions {
    AssemblyMethod method = AssemblyMethod::Exact;
    double fd_step = 1e-6;
    bool with_projected_norms = true;
};

struct SpectrumReport {
    RenormMode mode = RenormMode::Shifted;
    int N = 0, M = 0;
    double lambda = 0.0, mu = 0.0, t = 0.0;
    std::vector<std::complex<double>> eigenvalues;
    std::complex<double> delta1, delta2, kappa3;
    double tail_estimate = 0.0;    // largest head-column mass leaving the head
    double tail_input_norm = 0.0;  // largest |P_{>2} L psi_m| over tail inputs
    double stable_radius = 0.0;    // |kappa3| + tail_estimate
    double alpha = 0.0;
    double eig_residual = 0.0;  // |DA - A Lambda|_1 / |D|_1
    ProjectedNorms norms;
    InverseCertificate inverse;
    Eigen::MatrixXd matrix, A, B;
};

// Assembles the head matrix at s (shifted operator with c0, or the
// unshifted one when spec says so), decomposes it and collects the
// spectral diagnostics.
SpectrumReport stable_spectral_radius(const GenFunction& s_star, const RenormSpec& spec,
                                      std::shared_ptr<const BasisTable> table, const SpectrumOptions& opt = {});

// Real eigenvector of eig closest to v in l1 after both are scaled to unit
// l1 norm and aligned in sign. Complex pairs are skipped.
struct EigenvectorMatch {
    int index = -1;
    std::complex<double> value;
    double distance = 0.0;
};
EigenvectorMatch match_eigenvector(const EigenDecomposition& eig, const Eigen::VectorXd& v);

// Head coordinates of p in the basis, as a vector.
Eigen::VectorXd head_vector(const Poly2& p, const BasisTable& table);

// Relative residuals |L psi - k psi|_rho / |psi|_rho of the three eigen-identities
// at s, plus diagnostics for the shifted one.
struct EigenIdentities {
    double lambda = 0.0, mu = 0.0;
    double frozen = 0.0;          // D R_* psi_s against lambda
    double ekw = 0.0;             // D R_EKW psi_EKW against lambda
    double shifted_null = 0.0;    // |D R_c0 psi_EKW| relative
    double ekw_printed = 0.0;     // printed psi_EKW form against lambda
    double shifted_rayleigh = 0.0;   // <L psi, psi> / <psi, psi> in the shifted mode
    double shifted_eig_residual = 0.0;  // relative residual against that quotient
    double shifted_predicted = 0.0;  // lambda c0 / P_02 with P = s(Z, y)
};
EigenIdentities eigen_identities(const GenFunction& s, double c0);

}  // namespace pdren
