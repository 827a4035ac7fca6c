#include "hf/transfer.hpp"

namespace hf {

GridSpec coarse_grid(const GridSpec& fine) {
    if (fine.m % 2 != 0 || fine.n % 2 != 0)
        throw std::invalid_argument("coarse_grid: dimensions must be even");
    GridSpec c = fine;
    c.m = fine.m / 2;
    c.n = fine.n / 2;
    c.h = 2.0 * fine.h;
    return c;
}

CellField restrict_fw(const CellField& fine, GhostKind kind) {
    const GridSpec cg = coarse_grid(fine.grid());
    CellField out(cg);
    const GhostView f(fine, kind);
#pragma omp parallel for
    for (int J = 0; J < cg.n; ++J)
        for (int I = 0; I < cg.m; ++I) {
            const int i = 2 * I + 1, j = 2 * J + 1;  // fine cell at the coarse position
            out(I, J) = 0.25 * (f(i, j)
                                + 0.5 * (f(i - 1, j) + f(i + 1, j) + f(i, j - 1) + f(i, j + 1))
                                + 0.25 * (f(i - 1, j - 1) + f(i + 1, j - 1)
                                          + f(i - 1, j + 1) + f(i + 1, j + 1)));
        }
    return out;
}

CellField prolong_bilinear(const CellField& coarse, const GridSpec& fine,
                           GhostKind kind, bool homogeneous) {
    const GridSpec& cg = coarse.grid();
    if (fine.m != 2 * cg.m || fine.n != 2 * cg.n)
        throw std::invalid_argument("prolong_bilinear: grids are not nested");

    // corrections reflect about a zero wall value; only channel grids with
    // moving walls need the adjusted boundary copy
    const bool need_copy = homogeneous && cg.boundary.type == BoundaryType::Channel &&
                           (cg.boundary.u_wall_bottom != 0.0 || cg.boundary.u_wall_top != 0.0);
    CellField src;
    if (need_copy) {
        GridSpec g0 = cg;
        g0.boundary.u_wall_bottom = 0.0;
        g0.boundary.u_wall_top = 0.0;
        src = CellField(g0);
        for (std::size_t q = 0; q < src.size(); ++q) src.data()[q] = coarse.data()[q];
    }

    CellField out(fine);
    const GhostView c(need_copy ? src : coarse, kind);
#pragma omp parallel for
    for (int J = 0; J < cg.n; ++J)
        for (int I = 0; I < cg.m; ++I) {
            const double cc = c(I, J);
            const double cw = c(I - 1, J), cs = c(I, J - 1), csw = c(I - 1, J - 1);
            const int i = 2 * I, j = 2 * J;
            // fine (2I+1, 2J+1) coincides with the coarse sample
            out(i + 1, j + 1) = cc;
            out(i, j + 1) = 0.5 * (cc + cw);
            out(i + 1, j) = 0.5 * (cc + cs);
            out(i, j) = 0.25 * (cc + cw + cs + csw);
        }
    return out;
}

}  // namespace hf
