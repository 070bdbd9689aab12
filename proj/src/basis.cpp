#include "pdren/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pdren {

int basis_cardinality(int n) {
    if (n <= 0) return 0;
    int count = n + 1;  // (-1, j), j = 0..n
    for (int i = 0; 2 * i <= n - 1; ++i) count += n - 2 * i;
    return count;
}

BasisTable::BasisTable(int N, int M, double rho) : N_(N), M_(M), rho_(rho) {
    if (N < 1 || N > M) throw Error(Errc::InvalidArgument, "basis needs 1 <= N <= M");
    if (!(rho > 0.0)) throw Error(Errc::InvalidArgument, "basis radius must be positive");
    lookup_.assign(static_cast<std::size_t>((M + 2) * (M + 2)), -1);
    auto push = [&](int i, int j) {
        const int p = static_cast<int>(entries_.size());
        entries_.push_back({i, j, p + 1});
        lookup_[static_cast<std::size_t>((i + 1) * (M + 2) + j)] = p;
        (i + j < N ? head_ : tail_).push_back(p);
    };
    for (int j = 0; j <= M; ++j) push(-1, j);
    for (int i = 0; 2 * i <= M - 1; ++i)
        for (int j = i; i + j < M; ++j) push(i, j);

    vectors_.reserve(entries_.size());
    raw_norms_.reserve(entries_.size());
    for (const auto& e : entries_) {
        Poly2 v(M, rho);
        double norm;
        if (e.i < 0) {
            norm = std::pow(rho, e.j);
            v.set(0, e.j, 1.0 / norm);
        } else {
            const double r = static_cast<double>(e.i + 1) / (e.j + 1);
            norm = (1.0 + r) * std::pow(rho, e.i + e.j + 1);
            if (e.i == e.j) {
                v.set(e.i + 1, e.j, 2.0 / norm);
            } else {
                v.set(e.i + 1, e.j, 1.0 / norm);
                v.set(e.j + 1, e.i, r / norm);
            }
        }
        vectors_.push_back(std::move(v));
        raw_norms_.push_back(norm);
    }
}

const SymBasisIndex& BasisTable::at(int k) const {
    if (k < 1 || k > size()) throw Error(Errc::OutOfRange, "basis index " + std::to_string(k));
    return entries_[static_cast<std::size_t>(k - 1)];
}

int BasisTable::k_of(int i, int j) const {
    if (i < -1 || j < std::max(0, i) || i + j >= M_ || j > M_) {
        throw Error(Errc::OutOfRange, "basis pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    return lookup_[static_cast<std::size_t>((i + 1) * (M_ + 2) + j)] + 1;
}

const Poly2& BasisTable::vector(int k) const {
    (void)at(k);
    return vectors_[static_cast<std::size_t>(k - 1)];
}

double BasisTable::raw_norm(int k) const {
    (void)at(k);
    return raw_norms_[static_cast<std::size_t>(k - 1)];
}

BasisTable build_basis(int N, int M, double rho) { return BasisTable(N, M, rho); }

std::vector<double> expand_in_basis(const Poly2& s, const BasisTable& table, bool check) {
    if (s.rho() != table.rho()) throw Error(Errc::MismatchedDomain, "series and basis radii differ");
    if (s.degree() > table.M()) {
        for (int d = table.M() + 1; d <= s.degree(); ++d)
            for (int j = 0; j <= d; ++j)
                if (s.block(d)[j] != 0.0) throw Error(Errc::OutOfRange, "series degree exceeds the basis");
    }
    if (check && !is_symmetric(s)) {
        throw Error(Errc::NotSymmetric, "symmetry defect " + std::to_string(symmetry_defect(s)));
    }
    std::vector<double> out(static_cast<std::size_t>(table.size()));
    for (const auto& e : table.entries()) {
        const double n = table.raw_norm(e.k);
        double a;
        if (e.i < 0) {
            a = s.get(0, e.j);
        } else if (e.i == e.j) {
            a = 0.5 * s.get(e.i + 1, e.j);
        } else {
            const double r = static_cast<double>(e.i + 1) / (e.j + 1);
            a = (s.get(e.i + 1, e.j) + r * s.get(e.j + 1, e.i)) / (1.0 + r * r);
        }
        out[static_cast<std::size_t>(e.k - 1)] = a * n;
    }
    return out;
}

Poly2 from_basis(std::span<const double> coeffs, const BasisTable& table) {
    if (static_cast<int>(coeffs.size()) != table.size()) {
        throw Error(Errc::InvalidArgument, "coefficient vector length does not match the basis");
    }
    Poly2 out(table.M(), table.rho());
    for (const auto& e : table.entries()) {
        const double c = coeffs[static_cast<std::size_t>(e.k - 1)] / table.raw_norm(e.k);
        if (c == 0.0) continue;
        if (e.i < 0) {
            out.add_to(0, e.j, c);
        } else if (e.i == e.j) {
            out.add_to(e.i + 1, e.j, 2.0 * c);
        } else {
            out.add_to(e.i + 1, e.j, c);
            out.add_to(e.j + 1, e.i, c * (e.i + 1) / (e.j + 1));
        }
    }
    return out;
}

std::vector<double> head_coords(std::span<const double> full, const BasisTable& table) {
    std::vector<double> h;
    h.reserve(table.head_positions().size());
    for (int p : table.head_positions()) h.push_back(full[static_cast<std::size_t>(p)]);
    return h;
}

}  // namespace pdren
