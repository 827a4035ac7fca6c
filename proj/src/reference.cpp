#include "hf/reference.hpp"

#include <cmath>

namespace hf::ref {

namespace {
inline int wrap(int i, int n) { return (i % n + n) % n; }
}

CellField laplacian(const CellField& phi) {
    const GridSpec& g = phi.grid();
    CellField out(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            const int ie = wrap(i + 1, g.m), iw = wrap(i - 1, g.m);
            const int jn = wrap(j + 1, g.n), js = wrap(j - 1, g.n);
            out(i, j) = (phi(ie, j) + phi(iw, j) + phi(i, jn) + phi(i, js) - 4.0 * phi(i, j))
                        / (g.h * g.h);
        }
    return out;
}

CellField grad_x(const CellField& phi) {
    const GridSpec& g = phi.grid();
    CellField out(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i)
            out(i, j) = (phi(wrap(i + 1, g.m), j) - phi(wrap(i - 1, g.m), j)) / (2.0 * g.h);
    return out;
}

CellField grad_y(const CellField& phi) {
    const GridSpec& g = phi.grid();
    CellField out(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i)
            out(i, j) = (phi(i, wrap(j + 1, g.n)) - phi(i, wrap(j - 1, g.n))) / (2.0 * g.h);
    return out;
}

CellField divergence(const CellField& u, const CellField& v) {
    const GridSpec& g = u.grid();
    CellField out(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i)
            out(i, j) = (u(wrap(i + 1, g.m), j) - u(wrap(i - 1, g.m), j)
                         + v(i, wrap(j + 1, g.n)) - v(i, wrap(j - 1, g.n)))
                        / (2.0 * g.h);
    return out;
}

CellField vorticity(const CellField& u, const CellField& v) {
    const GridSpec& g = u.grid();
    CellField out(g);
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i)
            out(i, j) = (v(wrap(i + 1, g.m), j) - v(wrap(i - 1, g.m), j)
                         - u(i, wrap(j + 1, g.n)) + u(i, wrap(j - 1, g.n)))
                        / (2.0 * g.h);
    return out;
}

double inner(const CellField& a, const CellField& b) {
    const GridSpec& g = a.grid();
    double s = 0.0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) s += a(i, j) * b(i, j);
    return g.h * g.h * s;
}

void apply_n_cdft(const HydroCoeffs& c, double je_mass, const CellField& rho,
                  const CellField& u, const CellField& v, CellField& n1, CellField& n2,
                  CellField& n3) {
    const GridSpec& g = rho.grid();
    const CellField& rk = *c.rho_k;
    const CellField om = vorticity(*c.u_k, *c.v_k);
    const double h = g.h, s = c.s;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            const int ie = wrap(i + 1, g.m), iw = wrap(i - 1, g.m);
            const int jn = wrap(j + 1, g.n), js = wrap(j - 1, g.n);
            n1(i, j) = rho(i, j)
                       + s / (4.0 * h) * (rk(ie, j) * u(ie, j) - rk(iw, j) * u(iw, j)
                                          + rk(i, jn) * v(i, jn) - rk(i, js) * v(i, js));
            const double lap_u = (u(ie, j) + u(iw, j) + u(i, jn) + u(i, js) - 4.0 * u(i, j))
                                 / (h * h);
            const double lap_v = (v(ie, j) + v(iw, j) + v(i, jn) + v(i, js) - 4.0 * v(i, j))
                                 / (h * h);
            n2(i, j) = rk(i, j) * u(i, j)
                       - s * (-0.5 * rk(i, j) * om(i, j) * v(i, j)
                              - rk(i, j) / (4.0 * h) * (u(ie, j) * u(ie, j) - u(iw, j) * u(iw, j))
                              - rk(i, j) / (4.0 * h) * (v(ie, j) * v(ie, j) - v(iw, j) * v(iw, j))
                              - rk(i, j) / (2.0 * h) * (std::log(rho(ie, j)) - std::log(rho(iw, j)))
                              - 2.0 * rk(i, j) * je_mass / (2.0 * h) * (rho(ie, j) - rho(iw, j))
                              + 0.5 * c.gamma * lap_u);
            n3(i, j) = rk(i, j) * v(i, j)
                       - s * (0.5 * rk(i, j) * om(i, j) * u(i, j)
                              - rk(i, j) / (4.0 * h) * (u(i, jn) * u(i, jn) - u(i, js) * u(i, js))
                              - rk(i, j) / (4.0 * h) * (v(i, jn) * v(i, jn) - v(i, js) * v(i, js))
                              - rk(i, j) / (2.0 * h) * (std::log(rho(i, jn)) - std::log(rho(i, js)))
                              - 2.0 * rk(i, j) * je_mass / (2.0 * h) * (rho(i, jn) - rho(i, js))
                              + 0.5 * c.gamma * lap_v);
        }
}

void source_cdft(const HydroCoeffs& c, double je_mass, const CellField& conv_rho_k,
                 CellField& s1, CellField& s2, CellField& s3) {
    const GridSpec& g = conv_rho_k.grid();
    const CellField& rk = *c.rho_k;
    const CellField& uk = *c.u_k;
    const CellField& vk = *c.v_k;
    const CellField om = vorticity(uk, vk);
    const CellField lap_u = laplacian(uk);
    const CellField lap_v = laplacian(vk);
    const double h = g.h, s = c.s;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            const int ie = wrap(i + 1, g.m), iw = wrap(i - 1, g.m);
            const int jn = wrap(j + 1, g.n), js = wrap(j - 1, g.n);
            s1(i, j) = rk(i, j)
                       - s / (4.0 * h) * (rk(ie, j) * uk(ie, j) - rk(iw, j) * uk(iw, j)
                                          + rk(i, jn) * vk(i, jn) - rk(i, js) * vk(i, js));
            s2(i, j) = rk(i, j) * uk(i, j)
                       + s * (-0.5 * rk(i, j) * om(i, j) * vk(i, j)
                              + rk(i, j) / (2.0 * h) * (conv_rho_k(ie, j) - conv_rho_k(iw, j))
                              + 2.0 * rk(i, j) * je_mass / (2.0 * h) * (rk(ie, j) - rk(iw, j))
                              + 0.5 * c.gamma * lap_u(i, j));
            s3(i, j) = rk(i, j) * vk(i, j)
                       + s * (0.5 * rk(i, j) * om(i, j) * uk(i, j)
                              + rk(i, j) / (2.0 * h) * (conv_rho_k(i, jn) - conv_rho_k(i, js))
                              + 2.0 * rk(i, j) * je_mass / (2.0 * h) * (rk(i, jn) - rk(i, js))
                              + 0.5 * c.gamma * lap_v(i, j));
        }
}

void apply_n_pfc(const HydroCoeffs& c, double alpha, const CellField& rho, const CellField& u,
                 const CellField& v, const CellField& mu, const CellField& kappa, CellField& n1,
                 CellField& n2, CellField& n3, CellField& n4, CellField& n5) {
    const GridSpec& g = rho.grid();
    const CellField& rk = *c.rho_k;
    const CellField om = vorticity(*c.u_k, *c.v_k);
    const CellField lap_rho = laplacian(rho);
    const CellField lap_kap = laplacian(kappa);
    const double h = g.h, s = c.s;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            const int ie = wrap(i + 1, g.m), iw = wrap(i - 1, g.m);
            const int jn = wrap(j + 1, g.n), js = wrap(j - 1, g.n);
            n1(i, j) = rho(i, j)
                       + s / (4.0 * h) * (rk(ie, j) * u(ie, j) - rk(iw, j) * u(iw, j)
                                          + rk(i, jn) * v(i, jn) - rk(i, js) * v(i, js));
            const double lap_u = (u(ie, j) + u(iw, j) + u(i, jn) + u(i, js) - 4.0 * u(i, j))
                                 / (h * h);
            const double lap_v = (v(ie, j) + v(iw, j) + v(i, jn) + v(i, js) - 4.0 * v(i, j))
                                 / (h * h);
            n2(i, j) = rk(i, j) * u(i, j)
                       - s * (-0.5 * rk(i, j) * om(i, j) * v(i, j)
                              - rk(i, j) / (4.0 * h) * (u(ie, j) * u(ie, j) - u(iw, j) * u(iw, j))
                              - rk(i, j) / (4.0 * h) * (v(ie, j) * v(ie, j) - v(iw, j) * v(iw, j))
                              - rk(i, j) / (2.0 * h) * (mu(ie, j) - mu(iw, j))
                              + 0.5 * c.gamma * lap_u);
            n3(i, j) = rk(i, j) * v(i, j)
                       - s * (0.5 * rk(i, j) * om(i, j) * u(i, j)
                              - rk(i, j) / (4.0 * h) * (u(i, jn) * u(i, jn) - u(i, js) * u(i, js))
                              - rk(i, j) / (4.0 * h) * (v(i, jn) * v(i, jn) - v(i, js) * v(i, js))
                              - rk(i, j) / (2.0 * h) * (mu(i, jn) - mu(i, js))
                              + 0.5 * c.gamma * lap_v);
            const double d = rho(i, j) - 1.5;
            n4(i, j) = mu(i, j) - d * d * d / 3.0 - alpha * d - lap_kap(i, j);
            n5(i, j) = kappa(i, j) - lap_rho(i, j);
        }
}

void source_pfc(const HydroCoeffs& c, CellField& s1, CellField& s2, CellField& s3, CellField& s4,
                CellField& s5) {
    const GridSpec& g = c.rho_k->grid();
    const CellField& rk = *c.rho_k;
    const CellField& uk = *c.u_k;
    const CellField& vk = *c.v_k;
    const CellField om = vorticity(uk, vk);
    const CellField lap_u = laplacian(uk);
    const CellField lap_v = laplacian(vk);
    const CellField lap_r = laplacian(rk);
    const double h = g.h, s = c.s;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            const int ie = wrap(i + 1, g.m), iw = wrap(i - 1, g.m);
            const int jn = wrap(j + 1, g.n), js = wrap(j - 1, g.n);
            s1(i, j) = rk(i, j)
                       - s / (4.0 * h) * (rk(ie, j) * uk(ie, j) - rk(iw, j) * uk(iw, j)
                                          + rk(i, jn) * vk(i, jn) - rk(i, js) * vk(i, js));
            s2(i, j) = rk(i, j) * uk(i, j)
                       + s * (-0.5 * rk(i, j) * om(i, j) * vk(i, j) + 0.5 * c.gamma * lap_u(i, j));
            s3(i, j) = rk(i, j) * vk(i, j)
                       + s * (0.5 * rk(i, j) * om(i, j) * uk(i, j) + 0.5 * c.gamma * lap_v(i, j));
            s4(i, j) = 2.0 * lap_r(i, j);
            s5(i, j) = 0.0;
        }
}

}  // namespace hf::ref
