#include "hf/grid.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hf {

GridSpec make_grid(int m, int n, double h, BoundarySpec boundary) {
    if (m < 4 || n < 4) throw std::invalid_argument("grid: m, n must be >= 4");
    if (!(h > 0.0)) throw std::invalid_argument("grid: h must be positive");
    GridSpec g;
    g.m = m;
    g.n = n;
    g.h = h;
    g.boundary = boundary;
    return g;
}

void require_same_mesh(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!a.same_mesh(b))
        throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

std::pair<CellField, CellField> grad_h(const CellField& phi, GhostKind kind) {
    const GridSpec& g = phi.grid();
    CellField gx(g), gy(g);
    const GhostView p(phi, kind);
    const double c = 1.0 / (2.0 * g.h);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            gx(i, j) = c * (p(i + 1, j) - p(i - 1, j));
            gy(i, j) = c * (p(i, j + 1) - p(i, j - 1));
        }
    return {std::move(gx), std::move(gy)};
}

CellField div_h(const VelocityField& w) {
    require_same_mesh(w.u.grid(), w.v.grid(), "div_h");
    const GridSpec& g = w.grid();
    CellField out(g);
    const GhostView u(w.u, GhostKind::VelocityX);
    const GhostView v(w.v, GhostKind::VelocityY);
    const double c = 1.0 / (2.0 * g.h);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i)
            out(i, j) = c * (u(i + 1, j) - u(i - 1, j) + v(i, j + 1) - v(i, j - 1));
    return out;
}

CellField laplacian_h(const CellField& phi, GhostKind kind) {
    const GridSpec& g = phi.grid();
    CellField out(g);
    const GhostView p(phi, kind);
    const double c = 1.0 / (g.h * g.h);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i)
            out(i, j) = c * (p(i + 1, j) + p(i - 1, j) + p(i, j + 1) + p(i, j - 1)
                             - 4.0 * phi(i, j));
    return out;
}

CellField vorticity(const VelocityField& w) {
    require_same_mesh(w.u.grid(), w.v.grid(), "vorticity");
    const GridSpec& g = w.grid();
    CellField out(g);
    const GhostView u(w.u, GhostKind::VelocityX);
    const GhostView v(w.v, GhostKind::VelocityY);
    const double c = 1.0 / (2.0 * g.h);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i)
            out(i, j) = c * (v(i + 1, j) - v(i - 1, j) - u(i, j + 1) + u(i, j - 1));
    return out;
}

// Reductions accumulate one partial sum per row and combine the rows
// serially, so results do not depend on the thread count.
namespace {

template <class PerCell>
double row_reduced_sum(const GridSpec& g, PerCell&& f) {
    std::vector<double> row(g.n, 0.0);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j) {
        double s = 0.0;
        for (int i = 0; i < g.m; ++i) s += f(i, j);
        row[j] = s;
    }
    double total = 0.0;
    for (int j = 0; j < g.n; ++j) total += row[j];
    return total;
}

}  // namespace

double inner(const CellField& phi, const CellField& psi) {
    require_same_mesh(phi.grid(), psi.grid(), "inner");
    const GridSpec& g = phi.grid();
    return g.h * g.h *
           row_reduced_sum(g, [&](int i, int j) { return phi(i, j) * psi(i, j); });
}

double norm2(const CellField& phi) { return std::sqrt(inner(phi, phi)); }

double norm4_pow(const CellField& phi) {
    const GridSpec& g = phi.grid();
    return g.h * g.h * row_reduced_sum(g, [&](int i, int j) {
               const double x = phi(i, j);
               return x * x * x * x;
           });
}

double field_mass(const CellField& phi) {
    const GridSpec& g = phi.grid();
    return g.h * g.h * row_reduced_sum(g, [&](int i, int j) { return phi(i, j); });
}

double max_abs(const CellField& phi) {
    double mx = 0.0;
    const double* p = phi.data();
    const std::size_t nn = phi.size();
#pragma omp parallel for reduction(max : mx)
    for (std::size_t k = 0; k < nn; ++k) mx = std::max(mx, std::abs(p[k]));
    return mx;
}

double min_value(const CellField& phi) {
    double mn = phi.size() ? phi.data()[0] : 0.0;
    const double* p = phi.data();
    const std::size_t nn = phi.size();
#pragma omp parallel for reduction(min : mn)
    for (std::size_t k = 0; k < nn; ++k) mn = std::min(mn, p[k]);
    return mn;
}

double max_value(const CellField& phi) {
    double mx = phi.size() ? phi.data()[0] : 0.0;
    const double* p = phi.data();
    const std::size_t nn = phi.size();
#pragma omp parallel for reduction(max : mx)
    for (std::size_t k = 0; k < nn; ++k) mx = std::max(mx, p[k]);
    return mx;
}

}  // namespace hf
