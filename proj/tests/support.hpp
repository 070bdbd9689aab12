#pragma once

#include <cmath>
#include <random>

#include "pdren/genfun.hpp"
#include "pdren/taylor2.hpp"

namespace testing {

// Random polynomial whose degree-d block has weighted mass about scale/(d+1).
inline pdren::Poly2 random_poly(int deg, double rho, double scale, std::mt19937_64& rng, int store_deg = -1) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    pdren::Poly2 p(store_deg < 0 ? deg : store_deg, rho);
    for (int d = 0; d <= deg; ++d) {
        const double w = scale / ((d + 1.0) * (d + 1.0) * std::pow(rho, d));
        for (int j = 0; j <= d; ++j) p.set(d - j, j, U(rng) * w);
    }
    return p;
}

inline double max_abs_diff(const pdren::Poly2& a, const pdren::Poly2& b) {
    double m = 0.0;
    const int D = std::max(a.degree(), b.degree());
    for (int d = 0; d <= D; ++d)
        for (int j = 0; j <= d; ++j) m = std::max(m, std::abs(a.get(d - j, j) - b.get(d - j, j)));
    return m;
}

inline double coef_norm(const pdren::Poly2& a) { return pdren::norm_rho(a.without_tail()); }

// The shipped seed, loaded once.
inline const pdren::GenFunction& shipped_s0() {
    static const pdren::GenFunction s(pdren::load_series(std::string(PDREN_DATA_DIR) + "/s0.txt"));
    return s;
}

// Symmetric random direction: the symmetric projection of a random series.
inline pdren::Poly2 random_direction(int deg, int store_deg, double rho, std::mt19937_64& rng) {
    pdren::Poly2 p = pdren::symmetrize(random_poly(deg, rho, 1.0, rng, store_deg)).poly;
    return pdren::scale(p, 1.0 / coef_norm(p));
}

}  // namespace testing
