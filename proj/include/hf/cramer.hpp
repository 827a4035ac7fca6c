// Cramer's rule for the tiny per-cell systems solved inside the smoothers.
// Determinants are evaluated by elimination with partial pivoting.
#pragma once

#include <array>
#include <cmath>

namespace hf {

template <int N>
double det(std::array<std::array<double, N>, N> a) {
    double d = 1.0;
    for (int c = 0; c < N; ++c) {
        int p = c;
        for (int r = c + 1; r < N; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (a[p][c] == 0.0) return 0.0;
        if (p != c) {
            std::swap(a[p], a[c]);
            d = -d;
        }
        d *= a[c][c];
        for (int r = c + 1; r < N; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int k = c; k < N; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return d;
}

// x_i = det(A with column i replaced by b) / det(A). Returns false when the
// system determinant vanishes or is not finite.
template <int N>
bool cramer_solve(const std::array<std::array<double, N>, N>& a,
                  const std::array<double, N>& b, std::array<double, N>& x) {
    const double d = det<N>(a);
    if (d == 0.0 || !std::isfinite(d)) return false;
    for (int i = 0; i < N; ++i) {
        auto ai = a;
        for (int r = 0; r < N; ++r) ai[r][i] = b[r];
        x[i] = det<N>(ai) / d;
    }
    return true;
}

}  // namespace hf
