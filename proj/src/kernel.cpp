#include "hf/kernel.hpp"

#include <cmath>
#include <sstream>

namespace hf {

namespace {

double minimal_image(double d, double L) {
    // nearest periodic image of the offset d in [-L/2, L/2]
    return d - L * std::round(d / L);
}

void finish_kernel(KernelSpec& k) {
    const GridSpec& g = k.grid;
    k.samples_e = CellField(g);
    k.samples_c = CellField(g);
    double sum_j = 0.0, sum_je = 0.0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            const double v = k.samples(i, j);
            const double e = v <= 0.0 ? -v : 0.0;
            k.samples_e(i, j) = e;
            k.samples_c(i, j) = v + e;
            sum_j += v;
            sum_je += e;
        }
    k.j_mass = g.h * g.h * sum_j;
    k.je_mass = g.h * g.h * sum_je;

    k.dft = std::make_shared<Dft2>(g.m, g.n);
    k.transform.assign(g.cells(), cplx(0.0, 0.0));
    for (std::size_t q = 0; q < g.cells(); ++q) k.transform[q] = cplx(k.samples.data()[q], 0.0);
    k.dft->forward(k.transform);
}

}  // namespace

KernelSpec build_kernel(const GridSpec& grid, double nu, bool require_negative_mass) {
    if (grid.boundary.type != BoundaryType::Periodic)
        throw std::invalid_argument("build_kernel: kernel requires a fully periodic grid");
    if (!(nu > 0.0)) throw std::invalid_argument("build_kernel: nu must be positive");

    KernelSpec k;
    k.grid = grid;
    k.nu = nu;
    k.samples = CellField(grid);
    const double c2 = M_PI * M_PI / (2.0 * nu * nu);
    const double c4 = M_PI * M_PI / (4.0 * nu * nu);
    const double sqrt2 = std::sqrt(2.0);
    for (int j = 0; j < grid.n; ++j) {
        const double dy = minimal_image(j * grid.h, grid.ly());
        for (int i = 0; i < grid.m; ++i) {
            const double dx = minimal_image(i * grid.h, grid.lx());
            const double r2 = dx * dx + dy * dy;
            k.samples(i, j) = sqrt2 * std::exp(-c2 * r2) - std::exp(-c4 * r2);
        }
    }
    finish_kernel(k);
    if (require_negative_mass && k.j_mass >= 0.0) {
        std::ostringstream msg;
        msg << "build_kernel: (J*1) = " << k.j_mass
            << " >= 0; kernel violates the negative-mass assumption"
            << " (m=" << grid.m << ", n=" << grid.n << ", Lx=" << grid.lx()
            << ", nu=" << nu << ")";
        throw std::invalid_argument(msg.str());
    }
    return k;
}

KernelSpec build_kernel_from_samples(const GridSpec& grid, const CellField& samples) {
    require_same_mesh(grid, samples.grid(), "build_kernel_from_samples");
    KernelSpec k;
    k.grid = grid;
    k.samples = samples;
    finish_kernel(k);
    return k;
}

CellField convolve(const KernelSpec& kernel, const CellField& rho) {
    require_same_mesh(kernel.grid, rho.grid(), "convolve");
    const GridSpec& g = kernel.grid;
    std::vector<cplx> a(g.cells());
    for (std::size_t q = 0; q < g.cells(); ++q) a[q] = cplx(rho.data()[q], 0.0);
    kernel.dft->forward(a);
    for (std::size_t q = 0; q < g.cells(); ++q) a[q] *= kernel.transform[q];
    kernel.dft->inverse(a);

    CellField out(g);
    const double h2 = g.h * g.h;
    double max_re = 0.0, max_im = 0.0;
    for (std::size_t q = 0; q < g.cells(); ++q) {
        out.data()[q] = h2 * a[q].real();
        max_re = std::max(max_re, std::abs(a[q].real()));
        max_im = std::max(max_im, std::abs(a[q].imag()));
    }
    if (max_im > 1e-10 * (max_re + 1e-300))
        throw std::runtime_error("convolve: imaginary residue exceeds tolerance");
    return out;
}

CellField convolve_direct(const KernelSpec& kernel, const CellField& rho) {
    require_same_mesh(kernel.grid, rho.grid(), "convolve_direct");
    const GridSpec& g = kernel.grid;
    CellField out(g);
    const double h2 = g.h * g.h;
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            double s = 0.0;
            for (int b = 0; b < g.n; ++b) {
                int jj = j - b;
                if (jj < 0) jj += g.n;
                for (int a = 0; a < g.m; ++a) {
                    int ii = i - a;
                    if (ii < 0) ii += g.m;
                    s += kernel.samples(a, b) * rho(ii, jj);
                }
            }
            out(i, j) = h2 * s;
        }
    return out;
}

}  // namespace hf
