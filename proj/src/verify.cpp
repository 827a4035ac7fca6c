#include "hf/verify.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "hf/energy.hpp"
#include "hf/grid.hpp"
#include "hf/kernel.hpp"

namespace hf {

namespace {

std::string fmt(double observed, double threshold) {
    std::ostringstream ss;
    ss.precision(3);
    ss << std::scientific << "worst " << observed << " vs " << threshold;
    return ss.str();
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

CellField random_field(const GridSpec& g, std::mt19937_64& rng, double lo, double hi) {
    CellField f(g);
    std::uniform_real_distribution<double> d(lo, hi);
    for (std::size_t q = 0; q < f.size(); ++q) f.data()[q] = d(rng);
    return f;
}

// Edge-space machinery, used only inside the operator identities. An edge
// field stores f_{i+1/2,j} (x edges) or f_{i,j+1/2} (y edges) at the cell
// index of the lower neighbor; everything is periodic here.
struct EdgeOps {
    const GridSpec& g;
    int wrap_m(int i) const { return (i % g.m + g.m) % g.m; }
    int wrap_n(int j) const { return (j % g.n + g.n) % g.n; }

    CellField Dx(const CellField& phi) const {  // (phi_{i+1} - phi_i)/h on x edges
        CellField e(g);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i)
                e(i, j) = (phi(wrap_m(i + 1), j) - phi(i, j)) / g.h;
        return e;
    }
    CellField Dy(const CellField& phi) const {
        CellField e(g);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i)
                e(i, j) = (phi(i, wrap_n(j + 1)) - phi(i, j)) / g.h;
        return e;
    }
    CellField dx(const CellField& e) const {  // (f_{i+1/2} - f_{i-1/2})/h at cells
        CellField c(g);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i)
                c(i, j) = (e(i, j) - e(wrap_m(i - 1), j)) / g.h;
        return c;
    }
    CellField dy(const CellField& e) const {
        CellField c(g);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i)
                c(i, j) = (e(i, j) - e(i, wrap_n(j - 1))) / g.h;
        return c;
    }
    // [f||g]_edge = h^2 sum over edges of f g; the printed per-cell form
    // (f_+ g_+ + f_- g_-) counts every edge twice, and the identities only
    // hold with the per-edge normalization
    double edge_inner(const CellField& a, const CellField& b) const {
        double s = 0.0;
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i) s += a(i, j) * b(i, j);
        return g.h * g.h * s;
    }
};

}  // namespace

std::vector<CheckResult> verify_operator_identities(int pairs, unsigned seed) {
    std::mt19937_64 rng(seed);
    double worst_sbp = 0.0, worst_div = 0.0, worst_g1 = 0.0, worst_g2 = 0.0;
    for (int size : {16, 32}) {
        const GridSpec g = make_grid(size, size, 17.0 / size);
        const EdgeOps ops{g};
        for (int p = 0; p < pairs; ++p) {
            const CellField phi = random_field(g, rng, -1.0, 1.0);
            const CellField psi = random_field(g, rng, -1.0, 1.0);
            const CellField fx = random_field(g, rng, -1.0, 1.0);  // edge field

            // summation by parts: [Dx phi || f] = -(phi || dx f)
            worst_sbp = std::max(worst_sbp, rel_err(ops.edge_inner(ops.Dx(phi), fx),
                                                    -inner(phi, ops.dx(fx))));

            // divergence theorem: (grad phi || w) = -(phi || div w)
            VelocityField w(g);
            w.u = random_field(g, rng, -1.0, 1.0);
            w.v = random_field(g, rng, -1.0, 1.0);
            auto [gx, gy] = grad_h(phi);
            const double lhs = inner(gx, w.u) + inner(gy, w.v);
            worst_div = std::max(worst_div, rel_err(lhs, -inner(phi, div_h(w))));

            // Green's first identity: [Dx phi||Dx psi] + [Dy phi||Dy psi] = -(phi||lap psi)
            const double e1 = ops.edge_inner(ops.Dx(phi), ops.Dx(psi)) +
                              ops.edge_inner(ops.Dy(phi), ops.Dy(psi));
            worst_g1 = std::max(worst_g1, rel_err(e1, -inner(phi, laplacian_h(psi))));

            // Green's second identity: (phi||lap psi) = (lap phi||psi)
            worst_g2 = std::max(worst_g2, rel_err(inner(phi, laplacian_h(psi)),
                                                  inner(laplacian_h(phi), psi)));
        }
    }
    const double tol = 1e-12;
    return {
        {"summation-by-parts", worst_sbp <= tol, fmt(worst_sbp, tol)},
        {"divergence theorem", worst_div <= tol, fmt(worst_div, tol)},
        {"Green's first identity", worst_g1 <= tol, fmt(worst_g1, tol)},
        {"Green's second identity", worst_g2 <= tol, fmt(worst_g2, tol)},
    };
}

std::vector<CheckResult> verify_convolution(int fields, unsigned seed) {
    std::mt19937_64 rng(seed);
    double worst_match = 0.0, worst_adj = 0.0, worst_const = 0.0;
    for (int size : {16, 32}) {
        const GridSpec g = make_grid(size, size, 17.0 / size);
        const KernelSpec kernel = build_kernel(g, 2.362);
        for (int p = 0; p < fields; ++p) {
            const CellField rho = random_field(g, rng, -1.0, 1.0);
            const CellField psi = random_field(g, rng, -1.0, 1.0);
            const CellField fast = convolve(kernel, rho);
            const CellField direct = convolve_direct(kernel, rho);
            double scale = max_abs(direct) + 1e-300;
            for (int q = 0; q < int(fast.size()); ++q)
                worst_match = std::max(worst_match,
                                       std::abs(fast.data()[q] - direct.data()[q]) / scale);
            worst_adj = std::max(worst_adj, rel_err(inner(rho, convolve(kernel, psi)),
                                                    inner(convolve(kernel, rho), psi)));
        }
        CellField ones(g, 1.0);
        const CellField conv1 = convolve(kernel, ones);
        for (int q = 0; q < int(conv1.size()); ++q)
            worst_const = std::max(worst_const, std::abs(conv1.data()[q] - kernel.j_mass) /
                                                    std::abs(kernel.j_mass));
    }
    const double tol = 1e-12;
    return {
        {"transform vs direct convolution", worst_match <= tol, fmt(worst_match, tol)},
        {"convolution self-adjointness", worst_adj <= tol, fmt(worst_adj, tol)},
        {"constant in, constant out", worst_const <= tol, fmt(worst_const, tol)},
    };
}

namespace {

struct SplitProbe {
    double worst_ineq = 0.0;   // positive = violation, in units of scale
    double worst_convex = 0.0; // positive = negative second difference, scaled
};

SplitProbe probe_model(const ConvexSplitEnergy& en, const GridSpec& g, int pairs,
                       bool positive, std::mt19937_64& rng) {
    SplitProbe out;
    for (int p = 0; p < pairs; ++p) {
        const CellField phi = positive ? random_field(g, rng, 0.5, 2.0)
                                       : random_field(g, rng, -0.5, 1.5);
        const CellField psi = positive ? random_field(g, rng, 0.5, 2.0)
                                       : random_field(g, rng, -0.5, 1.5);
        const double Fphi = en.F(phi), Fpsi = en.F(psi);
        const CellField gc = en.grad_Fc(phi);
        const CellField ge = en.grad_Fe(psi);
        CellField diff_mu(g), diff_rho(g);
        for (std::size_t q = 0; q < diff_mu.size(); ++q) {
            diff_mu.data()[q] = gc.data()[q] - ge.data()[q];
            diff_rho.data()[q] = phi.data()[q] - psi.data()[q];
        }
        const double rhs = inner(diff_mu, diff_rho);
        const double scale = 1.0 + std::abs(Fphi) + std::abs(Fpsi);
        out.worst_ineq = std::max(out.worst_ineq, (Fphi - Fpsi - rhs) / scale);

        // convexity probe of F_c along a random line
        std::uniform_real_distribution<double> qd(-1.0, 1.0);
        const double q0 = qd(rng), dq = 0.25;
        const CellField v = random_field(g, rng, -0.2, 0.2);
        auto at = [&](double q) {
            CellField r = phi;
            for (std::size_t w = 0; w < r.size(); ++w) r.data()[w] += q * v.data()[w];
            return en.Fc(r);
        };
        const double f0 = at(q0 - dq), f1 = at(q0), f2 = at(q0 + dq);
        const double second = f0 - 2.0 * f1 + f2;
        const double cscale = 1.0 + std::abs(f0) + std::abs(f1) + std::abs(f2);
        out.worst_convex = std::max(out.worst_convex, -second / cscale);
    }
    return out;
}

}  // namespace

std::vector<CheckResult> verify_splitting(int pairs_per_model, unsigned seed) {
    std::mt19937_64 rng(seed);
    const GridSpec g16 = make_grid(16, 16, 17.0 / 16);
    const GridSpec g32 = make_grid(32, 32, 17.0 / 32);

    const CdftEnergy cdft16(std::make_shared<KernelSpec>(build_kernel(g16, 2.362)));
    const CdftEnergy cdft32(std::make_shared<KernelSpec>(build_kernel(g32, 2.362)));
    const PfcEnergy pfc = PfcEnergy::from_epsilon(0.025);

    SplitProbe c = probe_model(cdft16, g16, pairs_per_model / 2, true, rng);
    const SplitProbe c2 = probe_model(cdft32, g32, pairs_per_model - pairs_per_model / 2, true, rng);
    c.worst_ineq = std::max(c.worst_ineq, c2.worst_ineq);
    c.worst_convex = std::max(c.worst_convex, c2.worst_convex);

    SplitProbe p = probe_model(pfc, g16, pairs_per_model / 2, false, rng);
    const SplitProbe p2 = probe_model(pfc, g32, pairs_per_model - pairs_per_model / 2, false, rng);
    p.worst_ineq = std::max(p.worst_ineq, p2.worst_ineq);
    p.worst_convex = std::max(p.worst_convex, p2.worst_convex);

    const double tol_ineq = 1e-12, tol_cvx = 1e-10;
    return {
        {"splitting inequality (cdft)", c.worst_ineq <= tol_ineq, fmt(c.worst_ineq, tol_ineq)},
        {"splitting inequality (pfc)", p.worst_ineq <= tol_ineq, fmt(p.worst_ineq, tol_ineq)},
        {"convexity probe F_c (cdft)", c.worst_convex <= tol_cvx, fmt(c.worst_convex, tol_cvx)},
        {"convexity probe F_c (pfc)", p.worst_convex <= tol_cvx, fmt(p.worst_convex, tol_cvx)},
    };
}

namespace {

// best-epsilon central-difference check of one functional/gradient pair
double gradient_check(const ConvexSplitEnergy& en, bool convex_part, const CellField& rho,
                      const CellField& v) {
    const CellField grad = convex_part ? en.grad_Fc(rho) : en.grad_Fe(rho);
    const double directional = inner(grad, v);
    double best = 1e300;
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        CellField plus = rho, minus = rho;
        for (std::size_t q = 0; q < rho.size(); ++q) {
            plus.data()[q] += eps * v.data()[q];
            minus.data()[q] -= eps * v.data()[q];
        }
        const double fd = convex_part ? (en.Fc(plus) - en.Fc(minus)) / (2.0 * eps)
                                      : (en.Fe(plus) - en.Fe(minus)) / (2.0 * eps);
        best = std::min(best, rel_err(fd, directional));
    }
    return best;
}

}  // namespace

std::vector<CheckResult> verify_gradients(unsigned seed) {
    std::mt19937_64 rng(seed);
    const GridSpec g = make_grid(16, 16, 17.0 / 16);
    const CdftEnergy cdft(std::make_shared<KernelSpec>(build_kernel(g, 2.362)));
    const PfcEnergy pfc = PfcEnergy::from_epsilon(0.025);

    double worst = 0.0;
    std::vector<CheckResult> out;
    auto run = [&](const ConvexSplitEnergy& en, bool convex_part, bool positive,
                   const char* name) {
        worst = 0.0;
        for (int p = 0; p < 20; ++p) {
            const CellField rho = positive ? random_field(g, rng, 0.5, 2.0)
                                           : random_field(g, rng, -0.5, 1.5);
            const CellField v = random_field(g, rng, -1.0, 1.0);
            worst = std::max(worst, gradient_check(en, convex_part, rho, v));
        }
        const double tol = 1e-6;
        out.push_back({name, worst <= tol, fmt(worst, tol)});
    };
    run(cdft, true, true, "grad F_c vs central differences (cdft)");
    run(cdft, false, true, "grad F_e vs central differences (cdft)");
    run(pfc, true, false, "grad F_c vs central differences (pfc)");
    run(pfc, false, false, "grad F_e vs central differences (pfc)");
    return out;
}

std::vector<CheckResult> verify_all() {
    std::vector<CheckResult> all;
    for (auto&& part : {verify_operator_identities(), verify_convolution(), verify_splitting(),
                        verify_gradients()})
        all.insert(all.end(), part.begin(), part.end());
    return all;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

}  // namespace hf
