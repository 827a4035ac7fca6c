// Experiment drivers: temporal convergence studies on nested grids, freezing
// of a super-cooled liquid from a random perturbation, the sheared
// nanocrystal channel, and the pure gradient-flow validation stepper.
#pragma once

#include <functional>
#include <optional>
#include <random>

#include "hf/gradient_flow.hpp"
#include "hf/multigrid.hpp"
#include "hf/scheme.hpp"

namespace hf {

// --- initial conditions ----------------------------------------------------

// Smooth trigonometric start for the nonlocal convergence test; mean
// pi/6 * 0.6 (packing fraction 0.6). The mode arguments are fixed to the
// 32-periodic forms, so the field is periodic on [0,32)^2.
CellField ic_cdft_smooth(const GridSpec& grid);

// Local-model variant: sqrt(3) * [-0.07 + same perturbations] + 1/2.
CellField ic_pfc_smooth(const GridSpec& grid);

// rho_bar * (1 + amplitude * eta), eta iid uniform in [0,1] drawn in storage
// order (x fastest) from the seeded generator.
CellField ic_random_perturbation(const GridSpec& grid, double rho_bar, double amplitude,
                                 std::mt19937_64& rng);

// One-mode hexagonal solid rho_s + A (cos(sqrt(3)x/2 + pi) cos(y/2) - cos(y)/2).
CellField one_mode_field(const GridSpec& grid, double rho_s, double epsilon);
double one_mode_amplitude(double rho_s, double epsilon);

// One-mode solid inside a regular hexagon (main diagonal diag_atoms lattice
// constants, along x, centered in the domain), liquid density outside.
CellField build_nucleus(const GridSpec& grid, double rho_s, double rho_l, double epsilon,
                        int diag_atoms);

// --- Cauchy errors ----------------------------------------------------------

// l2 (coarse-grid weighted) norm of rho^h_{ij} - rho^{h/2}_{2i,2j} at
// coinciding cells; fine must double coarse in both directions.
double cauchy_error(const CellField& coarse, const CellField& fine);
// log2(e_coarse_pair / e_fine_pair)
double rate(double e_coarse_pair, double e_fine_pair);

// --- per-step observation hook ----------------------------------------------

struct StepRecord {
    long k = 0;
    double t = 0.0;
    EnergyReport energy;
    int cycles = 0;
    double res_linf = 0.0;
};

using StepObserver = std::function<void(const StepRecord&, const State&)>;

// Evolves the state with per-step energy/mass bookkeeping. Asserts energy
// monotonicity and mass conservation every step when `assert_decay` is set
// (relative slacks 1e-10), throwing on violation.
struct EvolveResult {
    State state;
    std::vector<double> t, total, kinetic, free_energy, mass;
    std::vector<int> cycles;
    std::vector<double> final_res;
    std::vector<std::vector<double>> res_histories;  // kept when keep_histories
};

EvolveResult evolve(State state, const StepConfig& cfg, const MultigridConfig& mg, long steps,
                    bool assert_decay, bool keep_histories = false,
                    const StepObserver& observer = nullptr);

// --- convergence study -------------------------------------------------------

struct ConvergenceStudy {
    ModelType model = ModelType::PFC;
    double nu = 1.0;         // nonlocal model
    double epsilon = 0.025;  // local model
    double domain = 32.0;    // Lx = Ly
    std::vector<int> sizes = {16, 32, 64, 128};
    double t_final = 1.0;
    double s_coeff = 0.025;  // s = s_coeff * h^2
    double gamma = 2.0;
    MultigridConfig mg;      // tol set per model by the caller
    StepObserver observer;
};

struct ConvergenceResult {
    std::vector<int> sizes;
    // per field (rho, u, v): errors[p] between sizes[p] and sizes[p+1]
    std::vector<std::array<double, 3>> errors;
    // rates[r] = log2(errors[r]/errors[r+1])
    std::vector<std::array<double, 3>> rates;
    std::vector<State> finals;
};

ConvergenceResult run_convergence(const ConvergenceStudy& study);

// Recompute the rate table from stored final fields (same pure function the
// in-run table uses).
ConvergenceResult rates_from_finals(const std::vector<int>& sizes,
                                    const std::vector<State>& finals);

// --- freezing ----------------------------------------------------------------

struct FreezeRun {
    ModelType model = ModelType::CDFT;
    double nu = 2.362;
    double epsilon = 0.025;
    double rho_bar = M_PI / 6.0 * 0.6;
    double amplitude = 0.1;
    unsigned long long seed = 1;
    int m = 128, n = 128;
    double Lx = 17.0, Ly = 17.0;
    double s = 0.02;
    double gamma = 2.0;
    double t_end = 2400.0;
    MultigridConfig mg;
    bool keep_histories = false;
    StepObserver observer;
};

EvolveResult run_freeze(const FreezeRun& run);

// --- sheared channel -----------------------------------------------------------

struct ShearRun {
    double epsilon = 0.4;
    double rho_l = 0.72958;
    double rho_s = 0.90073;
    int m = 256, n = 256;          // h fixed to pi/(2 sqrt 3)
    int nucleus_diag_atoms = 13;
    double s = 0.02;
    double gamma = 2.0;
    double anneal_t_end = 20000.0;
    double equil_tol = 1e-6;       // per-step change of every energy component
    double wall_speed = 0.1;       // +top, -bottom in phase 2
    double phase2_t_end = 400.0;   // duration of phase 2 beyond the anneal
    MultigridConfig mg;
    StepObserver observer;         // phase 1
    StepObserver observer2;        // phase 2
};

struct ShearResult {
    State annealed;          // end of phase 1 (the checkpoint state)
    State final_state;       // end of phase 2
    bool equilibrated = false;
    std::vector<double> phase1_total;  // per step
    std::vector<double> phase2_mass;
    std::vector<long> phase2_crystal_cells;
};

double shear_lattice_h();
// count of cells with rho above (rho_s + rho_l)/2
long crystal_extent(const CellField& rho, double rho_s, double rho_l);

ShearResult run_shear(const ShearRun& run);
// Phase 2 restarted from an existing annealed state (checkpoint path).
ShearResult run_shear_phase2(const ShearRun& run, const State& annealed);

// --- gradient flow --------------------------------------------------------------

struct GradientFlowRun {
    ModelType model = ModelType::PFC;
    double nu = 2.362;
    double epsilon = 0.025;
    double s = 1.0;
    long steps = 50;
    MultigridConfig mg;
};

struct GradientFlowResult {
    CellField rho;
    std::vector<double> F, mass;
};

GradientFlowResult run_gradient_flow(const ConvexSplitEnergy& energy, const CellField& rho0,
                                     const StepConfig& cfg, const MultigridConfig& mg,
                                     long steps);

}  // namespace hf
