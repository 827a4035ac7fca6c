// Pure gradient-flow validation stepper
//   rho^{k+1} - rho^k = s lap_h( dF_c[rho^{k+1}] - dF_e[rho^k] )
// solved by the same FAS machinery with the hydrodynamic unknowns removed.
// Exercises the convex splitting without the flow coupling; periodic only.
#pragma once

#include "hf/multigrid.hpp"
#include "hf/scheme.hpp"

namespace hf {

// Nonlocal model: single unknown rho. The logarithm is Newton-linearized
// inside the pointwise Gauss-Seidel update.
class CdftGradientSystem final : public ImplicitSystem {
public:
    CdftGradientSystem(const GridSpec& g, double s, double je_mass, const CellField* rho_k,
                       const KernelSpec* kernel);
    void apply_operator(const FieldBundle& g, FieldBundle& out) const override;
    void gauss_seidel_sweep(FieldBundle& g, double proj_delta, double w_damp) const override;
    std::unique_ptr<ImplicitSystem> coarsen() const override;

private:
    double je_mass_;
};

// Local model: unknowns (rho, mu, kappa) with the same constraint rows as
// the hydrodynamic system.
class PfcGradientSystem final : public ImplicitSystem {
public:
    PfcGradientSystem(const GridSpec& g, double s, double alpha, const CellField* rho_k);
    void apply_operator(const FieldBundle& g, FieldBundle& out) const override;
    void gauss_seidel_sweep(FieldBundle& g, double proj_delta, double w_damp) const override;
    std::unique_ptr<ImplicitSystem> coarsen() const override;

private:
    double alpha_;
};

std::unique_ptr<ImplicitSystem> build_gradient_system(const CellField& rho_k,
                                                      const StepConfig& cfg);

// One gradient-flow step; returns the new density and solver stats.
std::pair<CellField, SolveStats> gradient_flow_step(const CellField& rho_k,
                                                    const StepConfig& cfg,
                                                    const MultigridConfig& mg);

}  // namespace hf
