// Nonlinear FAS multigrid: damped lexicographic Gauss-Seidel smoothing with
// per-cell Cramer solves (provided by the system), positivity projection of
// the density slot, full-weighting/bilinear grid transfers, V-cycles.
#pragma once

#include <stdexcept>
#include <vector>

#include "hf/scheme.hpp"
#include "hf/transfer.hpp"

namespace hf {

struct MultigridConfig {
    int max_cycles = 50;
    double tol_linf = 1e-12;  // 1e-14 for the nonlocal model
    int pre_smooth = 1;
    int post_smooth = 1;
    double w_damp = 0.5;      // in [0, 1)
    double delta_proj = 0.0;  // 1e-10 for the nonlocal model
    int coarsest_size = 4;
    int coarsest_sweeps = 20;
};

struct SolveStats {
    int cycles = 0;
    std::vector<double> res_linf_history;  // [0] = initial residual
    double final_linf = 0.0;
    double final_l2 = 0.0;
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(std::string msg, std::vector<double> history)
        : std::runtime_error(std::move(msg)), res_linf_history(std::move(history)) {}
    std::vector<double> res_linf_history;
};

// Pointwise sqrt(rho^2 + delta^2); |rho| when delta = 0.
CellField project_positive(const CellField& rho, double delta);
void project_positive_inplace(CellField& rho, double delta);

// Damped smoother step: raw Gauss-Seidel sweep, then the field-level blend
// g <- (1-w) g_GS + w g_old, then density projection.
void smooth_sweep(const ImplicitSystem& sys, FieldBundle& g, const MultigridConfig& cfg);

// Coefficient hierarchy for one solve; level 0 is finest.
class LevelHierarchy {
public:
    LevelHierarchy(std::unique_ptr<ImplicitSystem> finest, int coarsest_size);
    int levels() const { return int(levels_.size()); }
    ImplicitSystem& level(int l) { return *levels_[l]; }
    const ImplicitSystem& level(int l) const { return *levels_[l]; }

private:
    std::vector<std::unique_ptr<ImplicitSystem>> levels_;
};

// One FAS V-cycle from level l downward; returns the updated guess in place.
void v_cycle(LevelHierarchy& hier, int l, FieldBundle& g, const MultigridConfig& cfg);

// Repeats V-cycles until the finest-level residual satisfies
// linf <= tol_linf; throws NonConvergence after max_cycles.
SolveStats solve(LevelHierarchy& hier, FieldBundle& g, const MultigridConfig& cfg);

}  // namespace hf
