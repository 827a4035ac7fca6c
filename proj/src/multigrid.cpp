#include "hf/multigrid.hpp"

#include <cmath>
#include <sstream>

namespace hf {

CellField project_positive(const CellField& rho, double delta) {
    CellField out = rho;
    project_positive_inplace(out, delta);
    return out;
}

void project_positive_inplace(CellField& rho, double delta) {
    double* p = rho.data();
    const std::size_t nn = rho.size();
    const double d2 = delta * delta;
#pragma omp parallel for
    for (std::size_t q = 0; q < nn; ++q) p[q] = std::sqrt(p[q] * p[q] + d2);
}

void smooth_sweep(const ImplicitSystem& sys, FieldBundle& g, const MultigridConfig& cfg) {
    sys.gauss_seidel_sweep(g, cfg.delta_proj, cfg.w_damp);
    project_positive_inplace(g[0], cfg.delta_proj);
}

LevelHierarchy::LevelHierarchy(std::unique_ptr<ImplicitSystem> finest, int coarsest_size) {
    levels_.push_back(std::move(finest));
    while (true) {
        const GridSpec& g = levels_.back()->grid();
        if (g.m % 2 != 0 || g.n % 2 != 0) break;
        if (g.m / 2 < coarsest_size || g.n / 2 < coarsest_size) break;
        levels_.push_back(levels_.back()->coarsen());
    }
}

namespace {

void restrict_bundle(const ImplicitSystem& fine_sys, const FieldBundle& fine, FieldBundle& coarse,
                     bool solution_kinds) {
    for (int slot = 0; slot < fine.count(); ++slot)
        coarse[slot] = restrict_fw(fine[slot], solution_kinds ? fine_sys.kind(slot)
                                                              : GhostKind::Scalar);
}

}  // namespace

void v_cycle(LevelHierarchy& hier, int l, FieldBundle& g, const MultigridConfig& cfg) {
    ImplicitSystem& sys = hier.level(l);

    if (l == hier.levels() - 1) {
        for (int sweep = 0; sweep < cfg.coarsest_sweeps; ++sweep) {
            smooth_sweep(sys, g, cfg);
            if (residual(sys, g).linf <= cfg.tol_linf) break;
        }
        return;
    }

    for (int sweep = 0; sweep < cfg.pre_smooth; ++sweep) smooth_sweep(sys, g, cfg);

    FieldBundle r;
    residual(sys, g, &r);

    ImplicitSystem& csys = hier.level(l + 1);
    const int nf = sys.field_count();
    FieldBundle gc(csys.grid(), nf);
    restrict_bundle(sys, g, gc, true);
    project_positive_inplace(gc[0], cfg.delta_proj);

    // FAS coarse source: S_c = N_c(R g) + R (S - N(g))
    FieldBundle rc(csys.grid(), nf);
    restrict_bundle(sys, r, rc, false);
    csys.apply_operator(gc, csys.source());
    for (int slot = 0; slot < nf; ++slot) {
        double* s = csys.source()[slot].data();
        const double* rr = rc[slot].data();
        const std::size_t nn = rc[slot].size();
#pragma omp parallel for
        for (std::size_t q = 0; q < nn; ++q) s[q] += rr[q];
    }

    FieldBundle gc2 = gc;
    v_cycle(hier, l + 1, gc2, cfg);

    // prolong the coarse correction
    for (int slot = 0; slot < nf; ++slot) {
        double* a = gc2[slot].data();
        const double* b = gc[slot].data();
        const std::size_t nn = gc[slot].size();
#pragma omp parallel for
        for (std::size_t q = 0; q < nn; ++q) a[q] -= b[q];
        const CellField corr = prolong_bilinear(gc2[slot], sys.grid(), sys.kind(slot), true);
        double* gn = g[slot].data();
        const double* cc = corr.data();
        const std::size_t nnf = g[slot].size();
#pragma omp parallel for
        for (std::size_t q = 0; q < nnf; ++q) gn[q] += cc[q];
    }
    project_positive_inplace(g[0], cfg.delta_proj);

    for (int sweep = 0; sweep < cfg.post_smooth; ++sweep) smooth_sweep(sys, g, cfg);
}

SolveStats solve(LevelHierarchy& hier, FieldBundle& g, const MultigridConfig& cfg) {
    SolveStats stats;
    ResidualNorms norms = residual(hier.level(0), g);
    stats.res_linf_history.push_back(norms.linf);
    if (norms.linf <= cfg.tol_linf) {
        stats.final_linf = norms.linf;
        stats.final_l2 = norms.l2;
        return stats;
    }
    for (int c = 1; c <= cfg.max_cycles; ++c) {
        v_cycle(hier, 0, g, cfg);
        norms = residual(hier.level(0), g);
        stats.res_linf_history.push_back(norms.linf);
        stats.cycles = c;
        if (norms.linf <= cfg.tol_linf) {
            stats.final_linf = norms.linf;
            stats.final_l2 = norms.l2;
            return stats;
        }
    }
    std::ostringstream msg;
    msg << "multigrid: no convergence after " << cfg.max_cycles
        << " cycles, residual linf = " << norms.linf << " (tol " << cfg.tol_linf << ")";
    throw NonConvergence(msg.str(), stats.res_linf_history);
}

}  // namespace hf
