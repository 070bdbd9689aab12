#pragma once

#include <span>
#include <vector>

#include "pdren/taylor2.hpp"

namespace pdren {

// Index (i, j) of the symmetric basis with its single index k (1-based).
// i = -1 labels the pure powers y^j.
struct SymBasisIndex {
    int i;
    int j;
    int k;

    // total degree of the basis polynomial
    int degree() const noexcept { return i < 0 ? j : i + j + 1; }
    // i + j, the grading that splits head and tail
    int grade() const noexcept { return i + j; }
};

// Number of basis elements with i + j < n.
int basis_cardinality(int n);

class BasisTable {
public:
    BasisTable() = default;
    BasisTable(int N, int M, double rho);

    int N() const noexcept { return N_; }
    int M() const noexcept { return M_; }
    double rho() const noexcept { return rho_; }
    int size() const noexcept { return static_cast<int>(entries_.size()); }
    int head_size() const noexcept { return static_cast<int>(head_.size()); }

    // entries ordered by k; entry p has k = p + 1
    const std::vector<SymBasisIndex>& entries() const noexcept { return entries_; }
    const SymBasisIndex& at(int k) const;
    int k_of(int i, int j) const;
    // Positions (k - 1) of the head entries i + j < N, ascending in k.
    const std::vector<int>& head_positions() const noexcept { return head_; }
    const std::vector<int>& tail_positions() const noexcept { return tail_; }

    // Normalized basis vector psi_k as a degree-M series.
    const Poly2& vector(int k) const;
    // weighted norm of the unnormalized polynomial for entry k
    double raw_norm(int k) const;

private:
    int N_ = 0, M_ = 0;
    double rho_ = 1.0;
    std::vector<SymBasisIndex> entries_;
    std::vector<int> head_, tail_;
    std::vector<int> lookup_;  // (i+1)*(M+2) + j -> position or -1
    std::vector<Poly2> vectors_;
    std::vector<double> raw_norms_;
};

BasisTable build_basis(int N, int M, double rho);

// Coefficients in the normalized basis, ordered by k. With check set a
// non-symmetric input throws NotSymmetric; otherwise it is projected.
std::vector<double> expand_in_basis(const Poly2& s, const BasisTable& table, bool check = true);
Poly2 from_basis(std::span<const double> coeffs, const BasisTable& table);

std::vector<double> head_coords(std::span<const double> full, const BasisTable& table);

}  // namespace pdren
