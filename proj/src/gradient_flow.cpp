#include "hf/gradient_flow.hpp"

#include <cmath>

#include "hf/cramer.hpp"
#include "hf/transfer.hpp"

namespace hf {

namespace {

inline double guarded_log(double x, double delta) {
    if (x > 0.0) return std::log(x);
    const double p = std::sqrt(x * x + delta * delta);
    return std::log(p > 0.0 ? p : 1e-300);
}

}  // namespace

// ---------------------------------------------------------------------------
// CDFT gradient flow: N(rho) = rho - s lap_h(ln rho + 2 (J_e*1) rho)
//                     S      = rho^k - s lap_h(2 (J_e*1) rho^k + J*rho^k)
// ---------------------------------------------------------------------------

namespace {

// lap_h is invariant under constant shifts; removing the mean before the
// stencil avoids the cancellation error of differencing O(1) potentials,
// which otherwise sets the residual floor of the large-s solves
void subtract_mean(CellField& w) {
    double mean = 0.0;
    for (std::size_t q = 0; q < w.size(); ++q) mean += w.data()[q];
    mean /= double(w.size());
    for (std::size_t q = 0; q < w.size(); ++q) w.data()[q] -= mean;
}

}  // namespace

CdftGradientSystem::CdftGradientSystem(const GridSpec& g, double s, double je_mass,
                                       const CellField* rho_k, const KernelSpec* kernel)
    : ImplicitSystem(g, {GhostKind::Scalar}, s, 0.0), je_mass_(je_mass) {
    if (!rho_k) return;  // coarse level: source filled by FAS
    require_positive(*rho_k, "gradient flow (cdft)");
    CellField w = convolve(*kernel, *rho_k);
    const double two_je = 2.0 * je_mass_;
    for (std::size_t q = 0; q < w.size(); ++q) w.data()[q] += two_je * rho_k->data()[q];
    subtract_mean(w);
    const CellField lap = laplacian_h(w);
    for (std::size_t q = 0; q < w.size(); ++q)
        source_[0].data()[q] = rho_k->data()[q] - s_ * lap.data()[q];
}

void CdftGradientSystem::apply_operator(const FieldBundle& g, FieldBundle& out) const {
    require_positive(g[0], "cdft gradient apply_operator");
    const GridSpec& gr = grid_;
    CellField w(gr);
    const double two_je = 2.0 * je_mass_;
#pragma omp parallel for
    for (int j = 0; j < gr.n; ++j)
        for (int i = 0; i < gr.m; ++i)
            w(i, j) = std::log(g[0](i, j)) + two_je * g[0](i, j);
    subtract_mean(w);
    const CellField lap = laplacian_h(w);
#pragma omp parallel for
    for (int j = 0; j < gr.n; ++j)
        for (int i = 0; i < gr.m; ++i)
            out[0](i, j) = g[0](i, j) - s_ * lap(i, j);
}

void CdftGradientSystem::gauss_seidel_sweep(FieldBundle& g, double proj_delta,
                                            double w_damp) const {
    const GridSpec& gr = grid_;
    CellField w(gr);
    const double two_je = 2.0 * je_mass_;
    for (int j = 0; j < gr.n; ++j)
        for (int i = 0; i < gr.m; ++i)
            w(i, j) = guarded_log(g[0](i, j), proj_delta) + two_je * g[0](i, j);
    // the row couples w through differences only; centering the cache keeps
    // the large-s cancellation noise out of the update
    double wmean = 0.0;
    for (std::size_t q = 0; q < w.size(); ++q) wmean += w.data()[q];
    wmean /= double(w.size());
    for (std::size_t q = 0; q < w.size(); ++q) w.data()[q] -= wmean;
    const GhostView wv(w, GhostKind::Scalar);
    const double invh2 = 1.0 / (gr.h * gr.h);
    const double c4 = 4.0 * s_ * invh2;

    for (int j = 0; j < gr.n; ++j)
        for (int i = 0; i < gr.m; ++i) {
            const double rold = g[0](i, j);
            const double rpos = rold > 0.0 ? rold : std::sqrt(rold * rold + proj_delta * proj_delta);
            const double wc = w(i, j);
            const double dw = 1.0 / (rpos > 0.0 ? rpos : 1e-300) + two_je;  // w'(rho)
            const double rhs = source_[0](i, j)
                               + s_ * invh2 * (wv(i + 1, j) + wv(i - 1, j)
                                               + wv(i, j + 1) + wv(i, j - 1))
                               - c4 * (wc - dw * rold);
            const double diag = 1.0 + c4 * dw;
            const double rnew = (1.0 - w_damp) * rhs / diag + w_damp * rold;
            g[0](i, j) = rnew;
            w(i, j) = guarded_log(rnew, proj_delta) + two_je * rnew - wmean;
        }
}

std::unique_ptr<ImplicitSystem> CdftGradientSystem::coarsen() const {
    return std::make_unique<CdftGradientSystem>(coarse_grid(grid_), s_, je_mass_, nullptr,
                                                nullptr);
}

// ---------------------------------------------------------------------------
// PFC gradient flow, unknowns (rho, mu, kappa):
//   N1 = rho - s lap_h mu        S1 = rho^k
//   N2 = mu - (rho-3/2)^3/3 - alpha (rho-3/2) - lap_h kappa,  S2 = 2 lap_h rho^k
//   N3 = kappa - lap_h rho       S3 = 0
// ---------------------------------------------------------------------------

PfcGradientSystem::PfcGradientSystem(const GridSpec& g, double s, double alpha,
                                     const CellField* rho_k)
    : ImplicitSystem(g, {GhostKind::Scalar, GhostKind::Scalar, GhostKind::Scalar}, s, 0.0),
      alpha_(alpha) {
    if (!rho_k) return;
    source_[0] = *rho_k;
    CellField lap = laplacian_h(*rho_k);
    for (std::size_t q = 0; q < lap.size(); ++q) lap.data()[q] *= 2.0;
    source_[1] = std::move(lap);
}

void PfcGradientSystem::apply_operator(const FieldBundle& g, FieldBundle& out) const {
    const GridSpec& gr = grid_;
    const GhostView rho(g[0], GhostKind::Scalar);
    const GhostView mu(g[1], GhostKind::Scalar);
    const GhostView kap(g[2], GhostKind::Scalar);
    const double invh2 = 1.0 / (gr.h * gr.h);
#pragma omp parallel for
    for (int j = 0; j < gr.n; ++j)
        for (int i = 0; i < gr.m; ++i) {
            const double lap_mu = invh2 * (mu(i + 1, j) + mu(i - 1, j) + mu(i, j + 1)
                                           + mu(i, j - 1) - 4.0 * g[1](i, j));
            const double lap_kap = invh2 * (kap(i + 1, j) + kap(i - 1, j) + kap(i, j + 1)
                                            + kap(i, j - 1) - 4.0 * g[2](i, j));
            const double lap_rho = invh2 * (rho(i + 1, j) + rho(i - 1, j) + rho(i, j + 1)
                                            + rho(i, j - 1) - 4.0 * g[0](i, j));
            const double d = g[0](i, j) - 1.5;
            out[0](i, j) = g[0](i, j) - s_ * lap_mu;
            out[1](i, j) = g[1](i, j) - d * d * d / 3.0 - alpha_ * d - lap_kap;
            out[2](i, j) = g[2](i, j) - lap_rho;
        }
}

void PfcGradientSystem::gauss_seidel_sweep(FieldBundle& g, double /*proj_delta*/,
                                           double w_damp) const {
    const GridSpec& gr = grid_;
    const GhostView rho(g[0], GhostKind::Scalar);
    const GhostView mu(g[1], GhostKind::Scalar);
    const GhostView kap(g[2], GhostKind::Scalar);
    const double invh2 = 1.0 / (gr.h * gr.h);

    for (int j = 0; j < gr.n; ++j)
        for (int i = 0; i < gr.m; ++i) {
            const double phi = g[0](i, j) - 1.5;
            const double c = alpha_ + phi * phi;
            const double r1 = source_[0](i, j)
                              + s_ * invh2 * (mu(i + 1, j) + mu(i - 1, j)
                                              + mu(i, j + 1) + mu(i, j - 1));
            const double r2 = source_[1](i, j) - (2.0 / 3.0) * phi * phi * phi - 1.5 * c
                              + invh2 * (kap(i + 1, j) + kap(i - 1, j)
                                         + kap(i, j + 1) + kap(i, j - 1));
            const double r3 = source_[2](i, j)
                              + invh2 * (rho(i + 1, j) + rho(i - 1, j)
                                         + rho(i, j + 1) + rho(i, j - 1));
            const std::array<std::array<double, 3>, 3> A = {{
                {1.0, 4.0 * s_ * invh2, 0.0},
                {-c, 1.0, 4.0 * invh2},
                {4.0 * invh2, 0.0, 1.0},
            }};
            const std::array<double, 3> rhs = {r1, r2, r3};
            std::array<double, 3> x;
            if (!cramer_solve<3>(A, rhs, x))
                throw std::runtime_error("pfc gradient smoother: vanishing local determinant");
            for (int slot = 0; slot < 3; ++slot)
                g[slot](i, j) = (1.0 - w_damp) * x[slot] + w_damp * g[slot](i, j);
        }
}

std::unique_ptr<ImplicitSystem> PfcGradientSystem::coarsen() const {
    return std::make_unique<PfcGradientSystem>(coarse_grid(grid_), s_, alpha_, nullptr);
}

// ---------------------------------------------------------------------------

std::unique_ptr<ImplicitSystem> build_gradient_system(const CellField& rho_k,
                                                      const StepConfig& cfg) {
    const GridSpec& g = rho_k.grid();
    if (g.boundary.type != BoundaryType::Periodic)
        throw std::invalid_argument("gradient flow: periodic grids only");
    if (cfg.model.type == ModelType::CDFT)
        return std::make_unique<CdftGradientSystem>(g, cfg.s, cfg.model.kernel->je_mass, &rho_k,
                                                    cfg.model.kernel.get());
    return std::make_unique<PfcGradientSystem>(g, cfg.s, cfg.model.alpha, &rho_k);
}

std::pair<CellField, SolveStats> gradient_flow_step(const CellField& rho_k,
                                                    const StepConfig& cfg,
                                                    const MultigridConfig& mg) {
    LevelHierarchy hier(build_gradient_system(rho_k, cfg), mg.coarsest_size);
    FieldBundle g;
    if (cfg.model.type == ModelType::CDFT) {
        g = FieldBundle(rho_k.grid(), 1);
        g[0] = rho_k;
    } else {
        g = FieldBundle(rho_k.grid(), 3);
        g[0] = rho_k;
        const PfcEnergy en(cfg.model.alpha);
        CellField mu = en.grad_Fc(rho_k);
        const CellField ge = en.grad_Fe(rho_k);
        for (std::size_t q = 0; q < mu.size(); ++q) mu.data()[q] -= ge.data()[q];
        g[1] = std::move(mu);
        g[2] = laplacian_h(rho_k);
    }
    SolveStats stats = solve(hier, g, mg);
    return {std::move(g[0]), std::move(stats)};
}

}  // namespace hf
