// The fully discrete implicit system N(g) = S solved once per time step,
// and the time-stepping driver. The convex part of the free energy is
// implicit, the concave part explicit; the advective and viscous terms use
// the trapezoidal velocity u^{k+1/2}.
//
// Unknown layouts (slot 0 is always the density):
//   nonlocal model: (rho, u, v)
//   local model:    (rho, u, v, mu, kappa)  with mu the split chemical
//                   potential and kappa = lap_h rho as auxiliary unknowns.
#pragma once

#include <memory>
#include <vector>

#include "hf/energy.hpp"
#include "hf/grid.hpp"
#include "hf/kernel.hpp"

namespace hf {

struct State {
    CellField rho;
    VelocityField w;
    double t = 0.0;
    long k = 0;
};

enum class ModelType { CDFT, PFC };

struct ModelSpec {
    ModelType type = ModelType::PFC;
    double alpha = 1.0;  // PFC: alpha = 1 - epsilon
    std::shared_ptr<const KernelSpec> kernel;  // CDFT

    static ModelSpec cdft(std::shared_ptr<const KernelSpec> k) {
        return {ModelType::CDFT, 1.0, std::move(k)};
    }
    static ModelSpec pfc_epsilon(double eps) { return {ModelType::PFC, 1.0 - eps, nullptr}; }
};

std::unique_ptr<ConvexSplitEnergy> make_energy(const ModelSpec& model);

struct StepConfig {
    double s = 0.0;      // time step, > 0
    double gamma = 2.0;  // viscosity, > 0
    ModelSpec model;
};

struct FieldBundle {
    std::vector<CellField> f;

    FieldBundle() = default;
    FieldBundle(const GridSpec& g, int count) : f(count, CellField(g)) {}
    int count() const { return int(f.size()); }
    CellField& operator[](int s) { return f[s]; }
    const CellField& operator[](int s) const { return f[s]; }
};

// One implicit solve: frozen step-k coefficients, the source S, and the
// nonlinear operator N, rediscretized per multigrid level.
class ImplicitSystem {
public:
    virtual ~ImplicitSystem() = default;

    const GridSpec& grid() const { return grid_; }
    int field_count() const { return int(kinds_.size()); }
    GhostKind kind(int slot) const { return kinds_[slot]; }
    FieldBundle& source() { return source_; }
    const FieldBundle& source() const { return source_; }
    double time_step() const { return s_; }

    // N(g); CDFT requires g.rho > 0 (caller projects first).
    virtual void apply_operator(const FieldBundle& g, FieldBundle& out) const = 0;

    // One lexicographic Gauss-Seidel sweep in place. Each cell is blended
    // toward its local Cramer solution, new = (1 - w_damp) * solved +
    // w_damp * old, so later cells read damped values; no projection here.
    // proj_delta guards logarithm reads against transient nonpositive
    // intermediates.
    virtual void gauss_seidel_sweep(FieldBundle& g, double proj_delta,
                                    double w_damp = 0.0) const = 0;

    // Same operator on the next coarser grid with restricted coefficients
    // and zero source (filled by the FAS cycle).
    virtual std::unique_ptr<ImplicitSystem> coarsen() const = 0;

protected:
    ImplicitSystem(const GridSpec& g, std::vector<GhostKind> kinds, double s, double gamma)
        : grid_(g), kinds_(std::move(kinds)), source_(g, int(kinds_.size())),
          s_(s), gamma_(gamma) {}

    GridSpec grid_;
    std::vector<GhostKind> kinds_;
    FieldBundle source_;
    double s_;
    double gamma_;
};

class CdftHydroSystem final : public ImplicitSystem {
public:
    // Coefficients frozen from step k; conv_rho_k = J * rho^k on this grid
    // enters the source only, so coarse levels never convolve.
    CdftHydroSystem(const GridSpec& g, double s, double gamma, double je_mass,
                    CellField rho_k, CellField u_k, CellField v_k, CellField omega_k,
                    const CellField* conv_rho_k);

    void apply_operator(const FieldBundle& g, FieldBundle& out) const override;
    void gauss_seidel_sweep(FieldBundle& g, double proj_delta, double w_damp) const override;
    std::unique_ptr<ImplicitSystem> coarsen() const override;

private:
    double je_mass_;
    CellField rho_k_, u_k_, v_k_, omega_k_;
    CellField diag_, coup_;  // (rho^k + 4 s gamma / 2h^2), (s/2) rho^k omega^k
    void build_source(const CellField& conv_rho_k);
};

class PfcHydroSystem final : public ImplicitSystem {
public:
    PfcHydroSystem(const GridSpec& g, double s, double gamma, double alpha,
                   CellField rho_k, CellField u_k, CellField v_k, CellField omega_k,
                   bool with_source);

    void apply_operator(const FieldBundle& g, FieldBundle& out) const override;
    void gauss_seidel_sweep(FieldBundle& g, double proj_delta, double w_damp) const override;
    std::unique_ptr<ImplicitSystem> coarsen() const override;

private:
    double alpha_;
    CellField rho_k_, u_k_, v_k_, omega_k_;
    CellField diag_, coup_;
    void build_source();
};

// Assembles the finest-level system from the step-k state (computes the
// vorticity once and, for CDFT, one convolution).
std::unique_ptr<ImplicitSystem> build_system(const State& state, const StepConfig& cfg);

// Initial multigrid guess: the step-k fields, plus consistently initialized
// mu and kappa for the local model.
FieldBundle initial_guess(const State& state, const StepConfig& cfg);

struct ResidualNorms {
    double l2 = 0.0;
    double linf = 0.0;
};

// r = S - N(g); norms over all slots (l2 is h^2-weighted).
ResidualNorms residual(const ImplicitSystem& sys, const FieldBundle& g,
                       FieldBundle* r_out = nullptr);

struct MultigridConfig;  // multigrid.hpp
struct SolveStats;

// One implicit time step: solves N(g) = S by FAS multigrid from the step-k
// initial guess. Throws NonConvergence if the residual tolerance is not
// reached within max_cycles.
std::pair<State, SolveStats> step(const State& state, const StepConfig& cfg,
                                  const MultigridConfig& mg);

}  // namespace hf
