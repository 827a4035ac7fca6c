// Convex-split free energies. Each model exposes the total functional F,
// its convex/concave parts F_c and F_e with F = F_c - F_e, and their
// variational derivatives. The nonlocal model couples the density through
// a convolution kernel; the local model is a polynomial-plus-gradient
// crystal energy parameterized by alpha = 1 - epsilon.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hf/grid.hpp"
#include "hf/kernel.hpp"

namespace hf {

struct EnergyReport {
    double kinetic = 0.0;
    double free = 0.0;    // F(rho)
    double total = 0.0;   // kinetic + free
    double mass = 0.0;    // (rho || 1)
    std::vector<std::pair<std::string, double>> components;  // model specific
};

class ConvexSplitEnergy {
public:
    virtual ~ConvexSplitEnergy() = default;
    virtual std::string label() const = 0;

    virtual double F(const CellField& rho) const = 0;
    virtual double Fc(const CellField& rho) const = 0;
    virtual double Fe(const CellField& rho) const = 0;
    virtual CellField grad_Fc(const CellField& rho) const = 0;
    virtual CellField grad_Fe(const CellField& rho) const = 0;

    // model-specific breakdown of F, in a fixed order
    virtual std::vector<std::pair<std::string, double>> components(const CellField& rho) const = 0;
};

// F = (rho || ln(rho) - 1) - 1/2 (rho || J*rho)
// F_c = (rho || ln(rho) - 1) + (J_e*1)(rho || rho)
// F_e = (J_e*1)(rho || rho) + 1/2 (rho || J*rho)
class CdftEnergy : public ConvexSplitEnergy {
public:
    explicit CdftEnergy(std::shared_ptr<const KernelSpec> kernel);
    std::string label() const override { return "cdft"; }

    double F(const CellField& rho) const override;
    double Fc(const CellField& rho) const override;
    double Fe(const CellField& rho) const override;
    CellField grad_Fc(const CellField& rho) const override;  // ln(rho) + 2 (J_e*1) rho
    CellField grad_Fe(const CellField& rho) const override;  // 2 (J_e*1) rho + J*rho
    std::vector<std::pair<std::string, double>> components(const CellField& rho) const override;

    const KernelSpec& kernel() const { return *kernel_; }
    double je_mass() const { return kernel_->je_mass; }

private:
    std::shared_ptr<const KernelSpec> kernel_;
};

// F  = 1/12 ((rho-3/2)^4 || 1) + alpha/2 ((rho-3/2)^2 || 1)
//      + 1/2 (lap rho || lap rho) + (rho || lap rho)
// F_c = first three terms, F_e = -(rho || lap rho)
class PfcEnergy : public ConvexSplitEnergy {
public:
    explicit PfcEnergy(double alpha) : alpha_(alpha) {}
    static PfcEnergy from_epsilon(double eps) { return PfcEnergy(1.0 - eps); }
    std::string label() const override { return "pfc"; }
    double alpha() const { return alpha_; }
    double epsilon() const { return 1.0 - alpha_; }

    double F(const CellField& rho) const override;
    double Fc(const CellField& rho) const override;
    double Fe(const CellField& rho) const override;
    CellField grad_Fc(const CellField& rho) const override;  // (rho-3/2)^3/3 + alpha(rho-3/2) + lap^2 rho
    CellField grad_Fe(const CellField& rho) const override;  // -2 lap rho
    std::vector<std::pair<std::string, double>> components(const CellField& rho) const override;

private:
    double alpha_;
};

// Discrete total energy E = 1/2 (rho u || u) + 1/2 (rho v || v) + F(rho),
// with the model breakdown and mass attached.
EnergyReport total_energy(const CellField& rho, const VelocityField& w,
                          const ConvexSplitEnergy& energy);

// Throws std::domain_error naming the first offending cell.
void require_positive(const CellField& rho, const char* where);

}  // namespace hf
