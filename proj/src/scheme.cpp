#include "hf/scheme.hpp"

#include <cmath>
#include <sstream>

#include "hf/multigrid.hpp"
#include "hf/transfer.hpp"

namespace hf {

std::unique_ptr<ConvexSplitEnergy> make_energy(const ModelSpec& model) {
    if (model.type == ModelType::CDFT) return std::make_unique<CdftEnergy>(model.kernel);
    return std::make_unique<PfcEnergy>(model.alpha);
}

namespace {

[[noreturn]] void degenerate_cell(const char* where, int i, int j) {
    std::ostringstream msg;
    msg << where << ": vanishing local determinant at cell (" << i << "," << j << ")";
    throw std::runtime_error(msg.str());
}

// row-pointer view for the fully periodic fast paths: p[j] points at row j,
// with jp/jm the wrapped neighbors
struct Rows {
    const double* p;
    int m, n;
    const double* row(int j) const { return p + std::size_t(j) * m; }
};

inline int wrap_up(int j, int n) { return j + 1 < n ? j + 1 : 0; }
inline int wrap_dn(int j, int n) { return j > 0 ? j - 1 : n - 1; }

// ln with a projection guard for transient nonpositive intermediates inside
// a sweep; exact ln for positive input, so solver fixed points are exact.
inline double guarded_log(double x, double delta) {
    if (x > 0.0) return std::log(x);
    const double p = std::sqrt(x * x + delta * delta);
    return std::log(p > 0.0 ? p : 1e-300);
}

CellField log_field(const CellField& rho, const char* where) {
    require_positive(rho, where);
    const GridSpec& g = rho.grid();
    CellField out(g);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) out(i, j) = std::log(rho(i, j));
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// CDFT hydrodynamic system, unknowns (rho, u, v)
// ---------------------------------------------------------------------------

CdftHydroSystem::CdftHydroSystem(const GridSpec& g, double s, double gamma, double je_mass,
                                 CellField rho_k, CellField u_k, CellField v_k,
                                 CellField omega_k, const CellField* conv_rho_k)
    : ImplicitSystem(g, {GhostKind::Scalar, GhostKind::VelocityX, GhostKind::VelocityY}, s, gamma),
      je_mass_(je_mass),
      rho_k_(std::move(rho_k)), u_k_(std::move(u_k)), v_k_(std::move(v_k)),
      omega_k_(std::move(omega_k)), diag_(g), coup_(g) {
    const double visc_diag = 2.0 * s_ * gamma_ / (g.h * g.h);  // 4 s gamma / (2 h^2)
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            diag_(i, j) = rho_k_(i, j) + visc_diag;
            coup_(i, j) = 0.5 * s_ * rho_k_(i, j) * omega_k_(i, j);
        }
    if (conv_rho_k) build_source(*conv_rho_k);
}

void CdftHydroSystem::build_source(const CellField& conv_rho_k) {
    const GridSpec& g = grid_;
    const GhostView rk(rho_k_, GhostKind::Scalar);
    const GhostView uk(u_k_, GhostKind::VelocityX);
    const GhostView vk(v_k_, GhostKind::VelocityY);
    const GhostView jr(conv_rho_k, GhostKind::Scalar);
    const double inv2h = 1.0 / (2.0 * g.h);
    const double adv = s_ / (4.0 * g.h);
    const double invh2 = 1.0 / (g.h * g.h);
    const double two_je = 2.0 * je_mass_;
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            const double r = rho_k_(i, j);
            const double om = omega_k_(i, j);
            const double lap_u = invh2 * (uk(i + 1, j) + uk(i - 1, j) + uk(i, j + 1)
                                          + uk(i, j - 1) - 4.0 * u_k_(i, j));
            const double lap_v = invh2 * (vk(i + 1, j) + vk(i - 1, j) + vk(i, j + 1)
                                          + vk(i, j - 1) - 4.0 * v_k_(i, j));
            source_[0](i, j) = r - adv * (rk(i + 1, j) * uk(i + 1, j) - rk(i - 1, j) * uk(i - 1, j)
                                          + rk(i, j + 1) * vk(i, j + 1) - rk(i, j - 1) * vk(i, j - 1));
            source_[1](i, j) =
                r * u_k_(i, j)
                + s_ * (-0.5 * r * om * v_k_(i, j)
                        + r * inv2h * (jr(i + 1, j) - jr(i - 1, j))
                        + two_je * r * inv2h * (rk(i + 1, j) - rk(i - 1, j))
                        + 0.5 * gamma_ * lap_u);
            source_[2](i, j) =
                r * v_k_(i, j)
                + s_ * (0.5 * r * om * u_k_(i, j)
                        + r * inv2h * (jr(i, j + 1) - jr(i, j - 1))
                        + two_je * r * inv2h * (rk(i, j + 1) - rk(i, j - 1))
                        + 0.5 * gamma_ * lap_v);
        }
}

void CdftHydroSystem::apply_operator(const FieldBundle& g, FieldBundle& out) const {
    const GridSpec& gr = grid_;
    const CellField lnrho = log_field(g[0], "cdft apply_operator");
    const double inv2h = 1.0 / (2.0 * gr.h);
    const double inv4h = 1.0 / (4.0 * gr.h);
    const double adv = s_ / (4.0 * gr.h);
    const double invh2 = 1.0 / (gr.h * gr.h);
    const double two_je = 2.0 * je_mass_;

    if (gr.boundary.type == BoundaryType::Periodic) {
        const int m = gr.m, n = gr.n;
        const double s = s_, gamma = gamma_;
#pragma omp parallel for
        for (int j = 0; j < n; ++j) {
            const int jN = wrap_up(j, n), jS = wrap_dn(j, n);
            const std::size_t off = std::size_t(j) * m;
            const double* rc = g[0].data() + off;
            const double* rN = g[0].data() + std::size_t(jN) * m;
            const double* rS = g[0].data() + std::size_t(jS) * m;
            const double* uc = g[1].data() + off;
            const double* uN = g[1].data() + std::size_t(jN) * m;
            const double* uS = g[1].data() + std::size_t(jS) * m;
            const double* vc = g[2].data() + off;
            const double* vN = g[2].data() + std::size_t(jN) * m;
            const double* vS = g[2].data() + std::size_t(jS) * m;
            const double* lc = lnrho.data() + off;
            const double* lN = lnrho.data() + std::size_t(jN) * m;
            const double* lS = lnrho.data() + std::size_t(jS) * m;
            const double* kc = rho_k_.data() + off;
            const double* kN = rho_k_.data() + std::size_t(jN) * m;
            const double* kS = rho_k_.data() + std::size_t(jS) * m;
            const double* om = omega_k_.data() + off;
            double* o1 = out[0].data() + off;
            double* o2 = out[1].data() + off;
            double* o3 = out[2].data() + off;
            for (int i = 0; i < m; ++i) {
                const int iE = i + 1 < m ? i + 1 : 0;
                const int iW = i > 0 ? i - 1 : m - 1;
                const double r = kc[i];
                const double uE = uc[iE], uW = uc[iW], un = uN[i], us = uS[i];
                const double vE = vc[iE], vW = vc[iW], vn = vN[i], vs = vS[i];
                const double lap_u = invh2 * (uE + uW + un + us - 4.0 * uc[i]);
                const double lap_v = invh2 * (vE + vW + vn + vs - 4.0 * vc[i]);
                o1[i] = rc[i] + adv * (kc[iE] * uE - kc[iW] * uW + kN[i] * vn - kS[i] * vs);
                o2[i] = r * uc[i]
                        + s * (0.5 * r * om[i] * vc[i]
                               + r * inv4h * (uE * uE - uW * uW)
                               + r * inv4h * (vE * vE - vW * vW)
                               + r * inv2h * (lc[iE] - lc[iW])
                               + two_je * r * inv2h * (rc[iE] - rc[iW])
                               - 0.5 * gamma * lap_u);
                o3[i] = r * vc[i]
                        + s * (-0.5 * r * om[i] * uc[i]
                               + r * inv4h * (un * un - us * us)
                               + r * inv4h * (vn * vn - vs * vs)
                               + r * inv2h * (lN[i] - lS[i])
                               + two_je * r * inv2h * (rN[i] - rS[i])
                               - 0.5 * gamma * lap_v);
            }
        }
        return;
    }

    const GhostView rho(g[0], GhostKind::Scalar);
    const GhostView u(g[1], GhostKind::VelocityX);
    const GhostView v(g[2], GhostKind::VelocityY);
    const GhostView ln(lnrho, GhostKind::Scalar);
    const GhostView rk(rho_k_, GhostKind::Scalar);
#pragma omp parallel for
    for (int j = 0; j < gr.n; ++j)
        for (int i = 0; i < gr.m; ++i) {
            const double r = rho_k_(i, j);
            const double om = omega_k_(i, j);
            const double uE = u(i + 1, j), uW = u(i - 1, j), uN = u(i, j + 1), uS = u(i, j - 1);
            const double vE = v(i + 1, j), vW = v(i - 1, j), vN = v(i, j + 1), vS = v(i, j - 1);
            const double lap_u = invh2 * (uE + uW + uN + uS - 4.0 * g[1](i, j));
            const double lap_v = invh2 * (vE + vW + vN + vS - 4.0 * g[2](i, j));

            out[0](i, j) = g[0](i, j) + adv * (rk(i + 1, j) * uE - rk(i - 1, j) * uW
                                               + rk(i, j + 1) * vN - rk(i, j - 1) * vS);
            out[1](i, j) =
                r * g[1](i, j)
                + s_ * (0.5 * r * om * g[2](i, j)
                        + r * inv4h * (uE * uE - uW * uW)
                        + r * inv4h * (vE * vE - vW * vW)
                        + r * inv2h * (ln(i + 1, j) - ln(i - 1, j))
                        + two_je * r * inv2h * (rho(i + 1, j) - rho(i - 1, j))
                        - 0.5 * gamma_ * lap_u);
            out[2](i, j) =
                r * g[2](i, j)
                + s_ * (-0.5 * r * om * g[1](i, j)
                        + r * inv4h * (uN * uN - uS * uS)
                        + r * inv4h * (vN * vN - vS * vS)
                        + r * inv2h * (ln(i, j + 1) - ln(i, j - 1))
                        + two_je * r * inv2h * (rho(i, j + 1) - rho(i, j - 1))
                        - 0.5 * gamma_ * lap_v);
        }
}

void CdftHydroSystem::gauss_seidel_sweep(FieldBundle& g, double proj_delta,
                                         double w_damp) const {
    const GridSpec& gr = grid_;
    CellField lnrho(gr);
    for (int j = 0; j < gr.n; ++j)
        for (int i = 0; i < gr.m; ++i) lnrho(i, j) = guarded_log(g[0](i, j), proj_delta);

    if (gr.boundary.type == BoundaryType::Periodic) {
        const int m = gr.m, n = gr.n;
        const double s = s_, gamma = gamma_;
        const double inv2h = 1.0 / (2.0 * gr.h);
        const double inv4h = 1.0 / (4.0 * gr.h);
        const double adv = s / (4.0 * gr.h);
        const double invh2 = 1.0 / (gr.h * gr.h);
        const double two_je = 2.0 * je_mass_;
        const double gh = 0.5 * gamma * invh2;
        const double wk = 1.0 - w_damp;
        for (int j = 0; j < n; ++j) {
            const int jN = wrap_up(j, n), jS = wrap_dn(j, n);
            const std::size_t off = std::size_t(j) * m;
            double* rc = g[0].data() + off;
            const double* rN = g[0].data() + std::size_t(jN) * m;
            const double* rS = g[0].data() + std::size_t(jS) * m;
            double* uc = g[1].data() + off;
            const double* uN = g[1].data() + std::size_t(jN) * m;
            const double* uS = g[1].data() + std::size_t(jS) * m;
            double* vc = g[2].data() + off;
            const double* vN = g[2].data() + std::size_t(jN) * m;
            const double* vS = g[2].data() + std::size_t(jS) * m;
            double* lc = lnrho.data() + off;
            const double* lN = lnrho.data() + std::size_t(jN) * m;
            const double* lS = lnrho.data() + std::size_t(jS) * m;
            const double* kc = rho_k_.data() + off;
            const double* kN = rho_k_.data() + std::size_t(jN) * m;
            const double* kS = rho_k_.data() + std::size_t(jS) * m;
            const double* s1 = source_[0].data() + off;
            const double* s2 = source_[1].data() + off;
            const double* s3 = source_[2].data() + off;
            const double* dg = diag_.data() + off;
            const double* cp = coup_.data() + off;
            for (int i = 0; i < m; ++i) {
                const int iE = i + 1 < m ? i + 1 : 0;
                const int iW = i > 0 ? i - 1 : m - 1;
                const double r = kc[i];
                const double uE = uc[iE], uW = uc[iW], un = uN[i], us = uS[i];
                const double vE = vc[iE], vW = vc[iW], vn = vN[i], vs = vS[i];
                const double rhs1 =
                    s1[i] - adv * (kc[iE] * uE - kc[iW] * uW + kN[i] * vn - kS[i] * vs);
                const double rhs2 =
                    s2[i] + s * (-r * inv4h * (uE * uE - uW * uW)
                                 - r * inv4h * (vE * vE - vW * vW)
                                 - r * inv2h * (lc[iE] - lc[iW])
                                 - two_je * r * inv2h * (rc[iE] - rc[iW])
                                 + gh * (uE + uW + un + us));
                const double rhs3 =
                    s3[i] + s * (-r * inv4h * (un * un - us * us)
                                 - r * inv4h * (vn * vn - vs * vs)
                                 - r * inv2h * (lN[i] - lS[i])
                                 - two_je * r * inv2h * (rN[i] - rS[i])
                                 + gh * (vE + vW + vn + vs));
                const double a = dg[i], b = cp[i];
                const double det = a * a + b * b;
                if (det == 0.0 || !std::isfinite(det)) degenerate_cell("cdft smoother", i, j);
                const double rho_new = wk * rhs1 + w_damp * rc[i];
                rc[i] = rho_new;
                uc[i] = wk * (a * rhs2 - b * rhs3) / det + w_damp * uc[i];
                vc[i] = wk * (b * rhs2 + a * rhs3) / det + w_damp * vc[i];
                lc[i] = guarded_log(rho_new, proj_delta);
            }
        }
        return;
    }

    const GhostView rho(g[0], GhostKind::Scalar);
    const GhostView u(g[1], GhostKind::VelocityX);
    const GhostView v(g[2], GhostKind::VelocityY);
    const GhostView ln(lnrho, GhostKind::Scalar);
    const GhostView rk(rho_k_, GhostKind::Scalar);
    const double inv2h = 1.0 / (2.0 * gr.h);
    const double inv4h = 1.0 / (4.0 * gr.h);
    const double adv = s_ / (4.0 * gr.h);
    const double invh2 = 1.0 / (gr.h * gr.h);
    const double two_je = 2.0 * je_mass_;
    const double gh = 0.5 * gamma_ * invh2;

    for (int j = 0; j < gr.n; ++j)
        for (int i = 0; i < gr.m; ++i) {
            const double r = rho_k_(i, j);
            const double uE = u(i + 1, j), uW = u(i - 1, j), uN = u(i, j + 1), uS = u(i, j - 1);
            const double vE = v(i + 1, j), vW = v(i - 1, j), vN = v(i, j + 1), vS = v(i, j - 1);

            const double rhs1 =
                source_[0](i, j) - adv * (rk(i + 1, j) * uE - rk(i - 1, j) * uW
                                          + rk(i, j + 1) * vN - rk(i, j - 1) * vS);
            const double rhs2 =
                source_[1](i, j)
                + s_ * (-r * inv4h * (uE * uE - uW * uW)
                        - r * inv4h * (vE * vE - vW * vW)
                        - r * inv2h * (ln(i + 1, j) - ln(i - 1, j))
                        - two_je * r * inv2h * (rho(i + 1, j) - rho(i - 1, j))
                        + gh * (uE + uW + uN + uS));
            const double rhs3 =
                source_[2](i, j)
                + s_ * (-r * inv4h * (uN * uN - uS * uS)
                        - r * inv4h * (vN * vN - vS * vS)
                        - r * inv2h * (ln(i, j + 1) - ln(i, j - 1))
                        - two_je * r * inv2h * (rho(i, j + 1) - rho(i, j - 1))
                        + gh * (vE + vW + vN + vS));

            // Cramer on the local system [[1,0,0],[0,a,b],[0,-b,a]]
            const double a = diag_(i, j), b = coup_(i, j);
            const double det = a * a + b * b;
            if (det == 0.0 || !std::isfinite(det)) degenerate_cell("cdft smoother", i, j);
            const double rho_new = (1.0 - w_damp) * rhs1 + w_damp * g[0](i, j);
            g[0](i, j) = rho_new;
            g[1](i, j) = (1.0 - w_damp) * (a * rhs2 - b * rhs3) / det + w_damp * g[1](i, j);
            g[2](i, j) = (1.0 - w_damp) * (b * rhs2 + a * rhs3) / det + w_damp * g[2](i, j);
            lnrho(i, j) = guarded_log(rho_new, proj_delta);
        }
}

std::unique_ptr<ImplicitSystem> CdftHydroSystem::coarsen() const {
    const GridSpec cg = coarse_grid(grid_);
    return std::make_unique<CdftHydroSystem>(
        cg, s_, gamma_, je_mass_,
        restrict_fw(rho_k_, GhostKind::Scalar),
        restrict_fw(u_k_, GhostKind::VelocityX),
        restrict_fw(v_k_, GhostKind::VelocityY),
        restrict_fw(omega_k_, GhostKind::Scalar), nullptr);
}

// ---------------------------------------------------------------------------
// PFC hydrodynamic system, unknowns (rho, u, v, mu, kappa)
// ---------------------------------------------------------------------------

PfcHydroSystem::PfcHydroSystem(const GridSpec& g, double s, double gamma, double alpha,
                               CellField rho_k, CellField u_k, CellField v_k,
                               CellField omega_k, bool with_source)
    : ImplicitSystem(g,
                     {GhostKind::Scalar, GhostKind::VelocityX, GhostKind::VelocityY,
                      GhostKind::Scalar, GhostKind::Scalar},
                     s, gamma),
      alpha_(alpha),
      rho_k_(std::move(rho_k)), u_k_(std::move(u_k)), v_k_(std::move(v_k)),
      omega_k_(std::move(omega_k)), diag_(g), coup_(g) {
    const double visc_diag = 2.0 * s_ * gamma_ / (g.h * g.h);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            diag_(i, j) = rho_k_(i, j) + visc_diag;
            coup_(i, j) = 0.5 * s_ * rho_k_(i, j) * omega_k_(i, j);
        }
    if (with_source) build_source();
}

void PfcHydroSystem::build_source() {
    const GridSpec& g = grid_;
    const GhostView rk(rho_k_, GhostKind::Scalar);
    const GhostView uk(u_k_, GhostKind::VelocityX);
    const GhostView vk(v_k_, GhostKind::VelocityY);
    const double adv = s_ / (4.0 * g.h);
    const double invh2 = 1.0 / (g.h * g.h);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            const double r = rho_k_(i, j);
            const double om = omega_k_(i, j);
            const double lap_u = invh2 * (uk(i + 1, j) + uk(i - 1, j) + uk(i, j + 1)
                                          + uk(i, j - 1) - 4.0 * u_k_(i, j));
            const double lap_v = invh2 * (vk(i + 1, j) + vk(i - 1, j) + vk(i, j + 1)
                                          + vk(i, j - 1) - 4.0 * v_k_(i, j));
            const double lap_r = invh2 * (rk(i + 1, j) + rk(i - 1, j) + rk(i, j + 1)
                                          + rk(i, j - 1) - 4.0 * rho_k_(i, j));
            source_[0](i, j) = r - adv * (rk(i + 1, j) * uk(i + 1, j) - rk(i - 1, j) * uk(i - 1, j)
                                          + rk(i, j + 1) * vk(i, j + 1) - rk(i, j - 1) * vk(i, j - 1));
            source_[1](i, j) = r * u_k_(i, j)
                               + s_ * (-0.5 * r * om * v_k_(i, j) + 0.5 * gamma_ * lap_u);
            source_[2](i, j) = r * v_k_(i, j)
                               + s_ * (0.5 * r * om * u_k_(i, j) + 0.5 * gamma_ * lap_v);
            source_[3](i, j) = 2.0 * lap_r;
            source_[4](i, j) = 0.0;
        }
}

void PfcHydroSystem::apply_operator(const FieldBundle& g, FieldBundle& out) const {
    const GridSpec& gr = grid_;
    const GhostView rho(g[0], GhostKind::Scalar);
    const GhostView u(g[1], GhostKind::VelocityX);
    const GhostView v(g[2], GhostKind::VelocityY);
    const GhostView mu(g[3], GhostKind::Scalar);
    const GhostView kap(g[4], GhostKind::Scalar);
    const GhostView rk(rho_k_, GhostKind::Scalar);
    const double inv2h = 1.0 / (2.0 * gr.h);
    const double inv4h = 1.0 / (4.0 * gr.h);
    const double adv = s_ / (4.0 * gr.h);
    const double invh2 = 1.0 / (gr.h * gr.h);
#pragma omp parallel for
    for (int j = 0; j < gr.n; ++j)
        for (int i = 0; i < gr.m; ++i) {
            const double r = rho_k_(i, j);
            const double om = omega_k_(i, j);
            const double uE = u(i + 1, j), uW = u(i - 1, j), uN = u(i, j + 1), uS = u(i, j - 1);
            const double vE = v(i + 1, j), vW = v(i - 1, j), vN = v(i, j + 1), vS = v(i, j - 1);
            const double lap_u = invh2 * (uE + uW + uN + uS - 4.0 * g[1](i, j));
            const double lap_v = invh2 * (vE + vW + vN + vS - 4.0 * g[2](i, j));
            const double lap_rho = invh2 * (rho(i + 1, j) + rho(i - 1, j) + rho(i, j + 1)
                                            + rho(i, j - 1) - 4.0 * g[0](i, j));
            const double lap_kap = invh2 * (kap(i + 1, j) + kap(i - 1, j) + kap(i, j + 1)
                                            + kap(i, j - 1) - 4.0 * g[4](i, j));
            const double d = g[0](i, j) - 1.5;

            out[0](i, j) = g[0](i, j) + adv * (rk(i + 1, j) * uE - rk(i - 1, j) * uW
                                               + rk(i, j + 1) * vN - rk(i, j - 1) * vS);
            out[1](i, j) = r * g[1](i, j)
                           + s_ * (0.5 * r * om * g[2](i, j)
                                   + r * inv4h * (uE * uE - uW * uW)
                                   + r * inv4h * (vE * vE - vW * vW)
                                   + r * inv2h * (mu(i + 1, j) - mu(i - 1, j))
                                   - 0.5 * gamma_ * lap_u);
            out[2](i, j) = r * g[2](i, j)
                           + s_ * (-0.5 * r * om * g[1](i, j)
                                   + r * inv4h * (uN * uN - uS * uS)
                                   + r * inv4h * (vN * vN - vS * vS)
                                   + r * inv2h * (mu(i, j + 1) - mu(i, j - 1))
                                   - 0.5 * gamma_ * lap_v);
            out[3](i, j) = g[3](i, j) - d * d * d / 3.0 - alpha_ * d - lap_kap;
            out[4](i, j) = g[4](i, j) - lap_rho;
        }
}

void PfcHydroSystem::gauss_seidel_sweep(FieldBundle& g, double /*proj_delta*/,
                                        double w_damp) const {
    const GridSpec& gr = grid_;
    const GhostView rho(g[0], GhostKind::Scalar);
    const GhostView u(g[1], GhostKind::VelocityX);
    const GhostView v(g[2], GhostKind::VelocityY);
    const GhostView mu(g[3], GhostKind::Scalar);
    const GhostView kap(g[4], GhostKind::Scalar);
    const GhostView rk(rho_k_, GhostKind::Scalar);
    const double inv2h = 1.0 / (2.0 * gr.h);
    const double inv4h = 1.0 / (4.0 * gr.h);
    const double adv = s_ / (4.0 * gr.h);
    const double invh2 = 1.0 / (gr.h * gr.h);
    const double gh = 0.5 * gamma_ * invh2;

    for (int j = 0; j < gr.n; ++j)
        for (int i = 0; i < gr.m; ++i) {
            const double r = rho_k_(i, j);
            const double uE = u(i + 1, j), uW = u(i - 1, j), uN = u(i, j + 1), uS = u(i, j - 1);
            const double vE = v(i + 1, j), vW = v(i - 1, j), vN = v(i, j + 1), vS = v(i, j - 1);
            const double phi = g[0](i, j) - 1.5;  // linearization point
            const double c = alpha_ + phi * phi;

            const double r1 = source_[0](i, j)
                              - adv * (rk(i + 1, j) * uE - rk(i - 1, j) * uW
                                       + rk(i, j + 1) * vN - rk(i, j - 1) * vS);
            const double r2 = source_[1](i, j)
                              + s_ * (-r * inv4h * (uE * uE - uW * uW)
                                      - r * inv4h * (vE * vE - vW * vW)
                                      - r * inv2h * (mu(i + 1, j) - mu(i - 1, j))
                                      + gh * (uE + uW + uN + uS));
            const double r3 = source_[2](i, j)
                              + s_ * (-r * inv4h * (uN * uN - uS * uS)
                                      - r * inv4h * (vN * vN - vS * vS)
                                      - r * inv2h * (mu(i, j + 1) - mu(i, j - 1))
                                      + gh * (vE + vW + vN + vS));
            // cubic linearized as phi^3 ~ 3 phi_l^2 phi - 2 phi_l^3
            const double r4 = source_[3](i, j) - (2.0 / 3.0) * phi * phi * phi - 1.5 * c
                              + invh2 * (kap(i + 1, j) + kap(i - 1, j)
                                         + kap(i, j + 1) + kap(i, j - 1));
            const double r5 = source_[4](i, j)
                              + invh2 * (rho(i + 1, j) + rho(i - 1, j)
                                         + rho(i, j + 1) + rho(i, j - 1));

            // Cramer solution of the local system
            //   [[1,0,0,0,0],[0,a,b,0,0],[0,-b,a,0,0],[-c,0,0,1,q],[q,0,0,0,1]]
            // written out: det = a^2 + b^2, the rho/mu/kappa rows eliminate
            // in closed form
            const double a = diag_(i, j), b = coup_(i, j);
            const double q = 4.0 * invh2;
            const double det = a * a + b * b;
            if (det == 0.0 || !std::isfinite(det)) degenerate_cell("pfc smoother", i, j);
            const double x0 = r1;
            const double x1 = (a * r2 - b * r3) / det;
            const double x2 = (b * r2 + a * r3) / det;
            const double x4 = r5 - q * x0;
            const double x3 = r4 + c * x0 - q * x4;
            const double wk = 1.0 - w_damp;
            g[0](i, j) = wk * x0 + w_damp * g[0](i, j);
            g[1](i, j) = wk * x1 + w_damp * g[1](i, j);
            g[2](i, j) = wk * x2 + w_damp * g[2](i, j);
            g[3](i, j) = wk * x3 + w_damp * g[3](i, j);
            g[4](i, j) = wk * x4 + w_damp * g[4](i, j);
        }
}

std::unique_ptr<ImplicitSystem> PfcHydroSystem::coarsen() const {
    const GridSpec cg = coarse_grid(grid_);
    return std::make_unique<PfcHydroSystem>(
        cg, s_, gamma_, alpha_,
        restrict_fw(rho_k_, GhostKind::Scalar),
        restrict_fw(u_k_, GhostKind::VelocityX),
        restrict_fw(v_k_, GhostKind::VelocityY),
        restrict_fw(omega_k_, GhostKind::Scalar), false);
}

// ---------------------------------------------------------------------------

std::unique_ptr<ImplicitSystem> build_system(const State& state, const StepConfig& cfg) {
    if (!(cfg.s > 0.0)) throw std::invalid_argument("build_system: s must be positive");
    if (!(cfg.gamma > 0.0)) throw std::invalid_argument("build_system: gamma must be positive");
    require_same_mesh(state.rho.grid(), state.w.grid(), "build_system");
    const GridSpec& g = state.rho.grid();
    CellField omega = vorticity(state.w);
    if (cfg.model.type == ModelType::CDFT) {
        require_positive(state.rho, "build_system (cdft)");
        const CellField conv = convolve(*cfg.model.kernel, state.rho);
        return std::make_unique<CdftHydroSystem>(g, cfg.s, cfg.gamma, cfg.model.kernel->je_mass,
                                                 state.rho, state.w.u, state.w.v,
                                                 std::move(omega), &conv);
    }
    return std::make_unique<PfcHydroSystem>(g, cfg.s, cfg.gamma, cfg.model.alpha, state.rho,
                                            state.w.u, state.w.v, std::move(omega), true);
}

FieldBundle initial_guess(const State& state, const StepConfig& cfg) {
    const GridSpec& g = state.rho.grid();
    if (cfg.model.type == ModelType::CDFT) {
        FieldBundle b(g, 3);
        b[0] = state.rho;
        b[1] = state.w.u;
        b[2] = state.w.v;
        return b;
    }
    FieldBundle b(g, 5);
    b[0] = state.rho;
    b[1] = state.w.u;
    b[2] = state.w.v;
    // consistent start: mu = grad_Fc(rho^k) - grad_Fe(rho^k), kappa = lap rho^k
    const PfcEnergy en(cfg.model.alpha);
    CellField mu = en.grad_Fc(state.rho);
    const CellField ge = en.grad_Fe(state.rho);
    for (std::size_t q = 0; q < mu.size(); ++q) mu.data()[q] -= ge.data()[q];
    b[3] = std::move(mu);
    b[4] = laplacian_h(state.rho);
    return b;
}

ResidualNorms residual(const ImplicitSystem& sys, const FieldBundle& g, FieldBundle* r_out) {
    FieldBundle n(sys.grid(), sys.field_count());
    sys.apply_operator(g, n);
    const GridSpec& gr = sys.grid();
    ResidualNorms norms;
    double sum2 = 0.0;
    for (int slot = 0; slot < sys.field_count(); ++slot) {
        const CellField& S = sys.source()[slot];
        CellField& N = n[slot];
        // per-row partial sums keep the reduction deterministic
        std::vector<double> row(gr.n, 0.0);
        std::vector<double> rowmax(gr.n, 0.0);
#pragma omp parallel for
        for (int j = 0; j < gr.n; ++j) {
            double s2 = 0.0, mx = 0.0;
            for (int i = 0; i < gr.m; ++i) {
                const double r = S(i, j) - N(i, j);
                N(i, j) = r;
                s2 += r * r;
                mx = std::max(mx, std::abs(r));
            }
            row[j] = s2;
            rowmax[j] = mx;
        }
        for (int j = 0; j < gr.n; ++j) {
            sum2 += row[j];
            norms.linf = std::max(norms.linf, rowmax[j]);
        }
    }
    norms.l2 = std::sqrt(gr.h * gr.h * sum2);
    if (r_out) *r_out = std::move(n);
    return norms;
}

std::pair<State, SolveStats> step(const State& state, const StepConfig& cfg,
                                  const MultigridConfig& mg) {
    LevelHierarchy hier(build_system(state, cfg), mg.coarsest_size);
    FieldBundle g = initial_guess(state, cfg);
    SolveStats stats = solve(hier, g, mg);

    State next;
    next.rho = std::move(g[0]);
    next.w.u = std::move(g[1]);
    next.w.v = std::move(g[2]);
    next.t = state.t + cfg.s;
    next.k = state.k + 1;
    return {std::move(next), std::move(stats)};
}

}  // namespace hf
