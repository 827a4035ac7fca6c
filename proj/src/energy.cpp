#include "hf/energy.hpp"

#include <cmath>
#include <sstream>

namespace hf {

void require_positive(const CellField& rho, const char* where) {
    const GridSpec& g = rho.grid();
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i)
            if (!(rho(i, j) > 0.0)) {
                std::ostringstream msg;
                msg << where << ": nonpositive density rho(" << i << "," << j
                    << ") = " << rho(i, j);
                throw std::domain_error(msg.str());
            }
}

namespace {

// (rho || ln rho - 1)
double ideal_gas_term(const CellField& rho) {
    const GridSpec& g = rho.grid();
    std::vector<double> row(g.n, 0.0);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j) {
        double s = 0.0;
        for (int i = 0; i < g.m; ++i) {
            const double r = rho(i, j);
            s += r * (std::log(r) - 1.0);
        }
        row[j] = s;
    }
    double total = 0.0;
    for (int j = 0; j < g.n; ++j) total += row[j];
    return g.h * g.h * total;
}

}  // namespace

CdftEnergy::CdftEnergy(std::shared_ptr<const KernelSpec> kernel) : kernel_(std::move(kernel)) {
    if (!kernel_) throw std::invalid_argument("CdftEnergy: null kernel");
}

double CdftEnergy::F(const CellField& rho) const {
    require_positive(rho, "cdft F");
    return ideal_gas_term(rho) - 0.5 * inner(rho, convolve(*kernel_, rho));
}

double CdftEnergy::Fc(const CellField& rho) const {
    require_positive(rho, "cdft Fc");
    return ideal_gas_term(rho) + je_mass() * inner(rho, rho);
}

double CdftEnergy::Fe(const CellField& rho) const {
    return je_mass() * inner(rho, rho) + 0.5 * inner(rho, convolve(*kernel_, rho));
}

CellField CdftEnergy::grad_Fc(const CellField& rho) const {
    require_positive(rho, "cdft grad_Fc");
    const GridSpec& g = rho.grid();
    CellField out(g);
    const double two_je = 2.0 * je_mass();
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i)
            out(i, j) = std::log(rho(i, j)) + two_je * rho(i, j);
    return out;
}

CellField CdftEnergy::grad_Fe(const CellField& rho) const {
    CellField out = convolve(*kernel_, rho);
    const GridSpec& g = rho.grid();
    const double two_je = 2.0 * je_mass();
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i)
            out(i, j) += two_je * rho(i, j);
    return out;
}

std::vector<std::pair<std::string, double>> CdftEnergy::components(const CellField& rho) const {
    require_positive(rho, "cdft components");
    return {{"ideal", ideal_gas_term(rho)},
            {"excess", -0.5 * inner(rho, convolve(*kernel_, rho))}};
}

// ---------------------------------------------------------------------------

namespace {

double quartic_term(const CellField& rho) {
    const GridSpec& g = rho.grid();
    std::vector<double> row(g.n, 0.0);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j) {
        double s = 0.0;
        for (int i = 0; i < g.m; ++i) {
            const double d = rho(i, j) - 1.5;
            s += d * d * d * d;
        }
        row[j] = s;
    }
    double total = 0.0;
    for (int j = 0; j < g.n; ++j) total += row[j];
    return g.h * g.h * total / 12.0;
}

double quadratic_term(const CellField& rho, double alpha) {
    const GridSpec& g = rho.grid();
    std::vector<double> row(g.n, 0.0);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j) {
        double s = 0.0;
        for (int i = 0; i < g.m; ++i) {
            const double d = rho(i, j) - 1.5;
            s += d * d;
        }
        row[j] = s;
    }
    double total = 0.0;
    for (int j = 0; j < g.n; ++j) total += row[j];
    return 0.5 * alpha * g.h * g.h * total;
}

}  // namespace

double PfcEnergy::F(const CellField& rho) const {
    const CellField lap = laplacian_h(rho);
    return quartic_term(rho) + quadratic_term(rho, alpha_) + 0.5 * inner(lap, lap) +
           inner(rho, lap);
}

double PfcEnergy::Fc(const CellField& rho) const {
    const CellField lap = laplacian_h(rho);
    return quartic_term(rho) + quadratic_term(rho, alpha_) + 0.5 * inner(lap, lap);
}

double PfcEnergy::Fe(const CellField& rho) const {
    return -inner(rho, laplacian_h(rho));
}

CellField PfcEnergy::grad_Fc(const CellField& rho) const {
    const GridSpec& g = rho.grid();
    CellField out = laplacian_h(laplacian_h(rho));
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            const double d = rho(i, j) - 1.5;
            out(i, j) += d * d * d / 3.0 + alpha_ * d;
        }
    return out;
}

CellField PfcEnergy::grad_Fe(const CellField& rho) const {
    CellField out = laplacian_h(rho);
    for (std::size_t q = 0; q < out.size(); ++q) out.data()[q] *= -2.0;
    return out;
}

std::vector<std::pair<std::string, double>> PfcEnergy::components(const CellField& rho) const {
    const CellField lap = laplacian_h(rho);
    return {{"quartic", quartic_term(rho)},
            {"quadratic", quadratic_term(rho, alpha_)},
            {"lap_sq", 0.5 * inner(lap, lap)},
            {"grad_like", inner(rho, lap)}};
}

// ---------------------------------------------------------------------------

EnergyReport total_energy(const CellField& rho, const VelocityField& w,
                          const ConvexSplitEnergy& energy) {
    require_same_mesh(rho.grid(), w.grid(), "total_energy");
    const GridSpec& g = rho.grid();
    std::vector<double> row(g.n, 0.0);
#pragma omp parallel for
    for (int j = 0; j < g.n; ++j) {
        double s = 0.0;
        for (int i = 0; i < g.m; ++i)
            s += rho(i, j) * (w.u(i, j) * w.u(i, j) + w.v(i, j) * w.v(i, j));
        row[j] = s;
    }
    double kin = 0.0;
    for (int j = 0; j < g.n; ++j) kin += row[j];

    EnergyReport rep;
    rep.kinetic = 0.5 * g.h * g.h * kin;
    rep.components = energy.components(rho);
    rep.free = 0.0;
    for (const auto& [name, value] : rep.components) rep.free += value;
    rep.total = rep.kinetic + rep.free;
    rep.mass = field_mass(rho);
    return rep;
}

}  // namespace hf
