// Configuration files, run outputs, and checkpointing.
//
// Config format: sectioned "key = value" text. Unknown sections or keys are
// errors. Series files are append-only CSV. Snapshots and checkpoints carry
// a short self-describing text header followed by little-endian float64
// payloads, so round trips are bit exact.
#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "hf/experiments.hpp"
#include "hf/scheme.hpp"

namespace hf {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string experiment;  // convergence | freeze | shear | gradient-flow | custom-step
    ModelType model = ModelType::CDFT;

    // model parameters
    double nu = 2.362;
    double epsilon = 0.025;

    unsigned long long seed = 1;

    // grid
    int m = 0, n = 0;
    double Lx = 0.0, Ly = 0.0;
    BoundarySpec boundary;

    // stepping
    double s = 0.0;
    double t_end = 0.0;
    double gamma = 2.0;

    MultigridConfig mg;

    // initial data (freeze / custom-step)
    double rho_bar = 0.0;
    double perturb_amplitude = 0.1;
    std::string init_checkpoint;

    // convergence study
    std::vector<int> conv_sizes = {16, 32, 64, 128};
    double conv_t_final = 1.0;
    double conv_s_coeff = 0.025;

    // shear channel
    double shear_rho_l = 0.72958;
    double shear_rho_s = 0.90073;
    int nucleus_diag_atoms = 13;
    double anneal_t_end = 20000.0;
    double equil_tol = 1e-6;
    double wall_speed = 0.1;
    double phase2_t_end = 400.0;

    long gf_steps = 50;

    // output
    std::string out_dir;
    long series_every = 1;
    long snapshot_every = 0;  // 0 = none
    bool pgm = false;
    double pgm_min = 0.0;
    double pgm_max = 2.9;
};

// Parses and validates; fills experiment/model defaults for keys the file
// omits. Errors carry the config line number or the offending field name.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& name = "<string>");

// Canonical echo of a fully resolved config; load(echo(cfg)) == cfg.
std::string echo_config(const RunConfig& cfg);

GridSpec config_grid(const RunConfig& cfg);
StepConfig config_step(const RunConfig& cfg);  // builds the kernel for CDFT

// --- outputs -----------------------------------------------------------------

class SeriesWriter {
public:
    SeriesWriter() = default;
    SeriesWriter(const std::string& path, const std::vector<std::string>& columns,
                 bool append = false);
    void write_row(const std::vector<double>& values);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
};

// raw row-major float64 dumps with named fields
void write_snapshot(const std::string& path, const GridSpec& grid, double t,
                    const std::vector<std::pair<std::string, const CellField*>>& fields);
struct Snapshot {
    GridSpec grid;
    double t = 0.0;
    std::vector<std::pair<std::string, CellField>> fields;
};
Snapshot read_snapshot(const std::string& path);

void write_checkpoint(const std::string& path, const State& state);
State read_checkpoint(const std::string& path);

// 8-bit grayscale, rho mapped linearly from [lo, hi] onto 0..255 (clamped)
void write_pgm(const std::string& path, const CellField& rho, double lo, double hi);

}  // namespace hf
