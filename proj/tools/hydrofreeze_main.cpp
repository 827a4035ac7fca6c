// Command-line driver.
//
//   hydrofreeze run <config> [--out DIR] [--seed N] [--extended] [--quiet]
//   hydrofreeze resume <checkpoint> <config> [flags]
//   hydrofreeze verify [--quiet]
//   hydrofreeze rates <rundir>
#include <malloc.h>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <optional>

#include "hf/experiments.hpp"
#include "hf/io.hpp"
#include "hf/verify.hpp"

namespace fs = std::filesystem;
using namespace hf;

namespace {

struct CliFlags {
    std::optional<std::string> out;
    std::optional<unsigned long long> seed;
    bool extended = false;
    bool quiet = false;
};

int usage() {
    std::cerr <<
        "usage:\n"
        "  hydrofreeze run <config.cfg> [--out DIR] [--seed N] [--extended] [--quiet]\n"
        "  hydrofreeze resume <checkpoint> <config.cfg> [--out DIR] [--quiet]\n"
        "  hydrofreeze verify [--quiet]\n"
        "  hydrofreeze rates <rundir>\n";
    return 2;
}

bool parse_flags(int argc, char** argv, int first, CliFlags& flags) {
    for (int a = first; a < argc; ++a) {
        const std::string f = argv[a];
        if (f == "--extended") flags.extended = true;
        else if (f == "--quiet") flags.quiet = true;
        else if (f == "--out" && a + 1 < argc) flags.out = argv[++a];
        else if (f == "--seed" && a + 1 < argc) flags.seed = std::stoull(argv[++a]);
        else {
            std::cerr << "unknown flag: " << f << "\n";
            return false;
        }
    }
    return true;
}

std::vector<std::string> series_columns(const RunConfig& cfg, bool shear) {
    std::vector<std::string> cols = {"time", "mass", "kinetic"};
    if (cfg.model == ModelType::CDFT) {
        cols.push_back("free_ideal");
        cols.push_back("free_excess");
    } else {
        cols.push_back("free_quartic");
        cols.push_back("free_quadratic");
        cols.push_back("free_lap_sq");
        cols.push_back("free_grad_like");
    }
    cols.push_back("free");
    cols.push_back("total");
    cols.push_back("cycles");
    cols.push_back("residual_linf");
    if (shear) cols.push_back("crystal_cells");
    return cols;
}

std::vector<double> series_row(const StepRecord& rec, std::optional<long> crystal) {
    std::vector<double> row = {rec.t, rec.energy.mass, rec.energy.kinetic};
    for (const auto& [name, value] : rec.energy.components) row.push_back(value);
    row.push_back(rec.energy.free);
    row.push_back(rec.energy.total);
    row.push_back(double(rec.cycles));
    row.push_back(rec.res_linf);
    if (crystal) row.push_back(double(*crystal));
    // invariant checked at write time: total = kinetic + free
    if (std::abs(rec.energy.total - rec.energy.kinetic - rec.energy.free) >
        1e-12 * (1.0 + std::abs(rec.energy.total)))
        throw std::runtime_error("series row violates total = kinetic + free");
    return row;
}

// per-step file output shared by the long-running experiments
struct RunOutput {
    fs::path dir;
    SeriesWriter series;
    const RunConfig* cfg;
    bool shear = false;
    bool quiet = false;

    RunOutput(const RunConfig& c, bool shear_run, bool append, bool q)
        : dir(c.out_dir), series(), cfg(&c), shear(shear_run), quiet(q) {
        fs::create_directories(dir);
        series = SeriesWriter((dir / "series.csv").string(), series_columns(c, shear_run), append);
        if (!append) {
            std::ofstream echo(dir / "config.echo.cfg");
            echo << echo_config(c);
        }
    }

    void operator()(const StepRecord& rec, const State& state) {
        if (rec.k % cfg->series_every == 0) {
            std::optional<long> crystal;
            if (shear) crystal = crystal_extent(state.rho, cfg->shear_rho_s, cfg->shear_rho_l);
            series.write_row(series_row(rec, crystal));
        }
        if (cfg->snapshot_every > 0 && rec.k % cfg->snapshot_every == 0) {
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%08ld.dat", rec.k);
            write_snapshot((dir / name).string(), state.rho.grid(), rec.t,
                           {{"rho", &state.rho}, {"u", &state.w.u}, {"v", &state.w.v}});
            if (cfg->pgm) {
                std::snprintf(name, sizeof name, "rho_%08ld.pgm", rec.k);
                write_pgm((dir / name).string(), state.rho, cfg->pgm_min, cfg->pgm_max);
            }
        }
        if (!quiet && rec.k % 500 == 0)
            std::cout << "step " << rec.k << "  t=" << rec.t << "  E=" << rec.energy.total
                      << "  cycles=" << rec.cycles << "\n";
    }
};

void write_rate_table(std::ostream& out, const ConvergenceResult& result) {
    out << "pair,err_rho,err_u,err_v,rate_rho,rate_u,rate_v\n";
    out.precision(17);
    for (std::size_t p = 0; p < result.errors.size(); ++p) {
        out << result.sizes[p] << "/" << result.sizes[p + 1] << "," << result.errors[p][0]
            << "," << result.errors[p][1] << "," << result.errors[p][2];
        if (p >= 1)
            out << "," << result.rates[p - 1][0] << "," << result.rates[p - 1][1] << ","
                << result.rates[p - 1][2];
        else
            out << ",,,";
        out << "\n";
    }
}

int run_convergence_cmd(const RunConfig& cfg, const CliFlags& flags) {
    ConvergenceStudy study;
    study.model = cfg.model;
    study.nu = cfg.nu;
    study.epsilon = cfg.epsilon;
    study.domain = cfg.Lx;
    study.sizes = cfg.conv_sizes;
    study.t_final = flags.extended ? 10.0 : cfg.conv_t_final;
    if (flags.extended) {
        study.sizes = {16, 32, 64, 128, 256};
        std::cout << "extended study: t_final = 10, grids up to 256^2\n";
    }
    study.s_coeff = cfg.conv_s_coeff;
    study.gamma = cfg.gamma;
    study.mg = cfg.mg;

    const ConvergenceResult result = run_convergence(study);

    fs::create_directories(cfg.out_dir);
    {
        std::ofstream echo(fs::path(cfg.out_dir) / "config.echo.cfg");
        echo << echo_config(cfg);
    }
    for (std::size_t q = 0; q < result.finals.size(); ++q) {
        char name[64];
        std::snprintf(name, sizeof name, "final_%04d.dat", result.sizes[q]);
        const State& st = result.finals[q];
        write_snapshot((fs::path(cfg.out_dir) / name).string(), st.rho.grid(), st.t,
                       {{"rho", &st.rho}, {"u", &st.w.u}, {"v", &st.w.v}});
    }
    std::ofstream table(fs::path(cfg.out_dir) / "rates.csv");
    write_rate_table(table, result);
    if (!flags.quiet) write_rate_table(std::cout, result);
    return 0;
}

int run_freeze_cmd(const RunConfig& cfg, bool quiet) {
    FreezeRun run;
    run.model = cfg.model;
    run.nu = cfg.nu;
    run.epsilon = cfg.epsilon;
    run.rho_bar = cfg.rho_bar;
    run.amplitude = cfg.perturb_amplitude;
    run.seed = cfg.seed;
    run.m = cfg.m;
    run.n = cfg.n;
    run.Lx = cfg.Lx;
    run.Ly = cfg.Ly;
    run.s = cfg.s;
    run.gamma = cfg.gamma;
    run.t_end = cfg.t_end;
    run.mg = cfg.mg;

    RunOutput out(cfg, false, false, quiet);
    run.observer = std::ref(out);
    EvolveResult result = run_freeze(run);
    write_checkpoint((out.dir / "checkpoint.dat").string(), result.state);
    if (!quiet)
        std::cout << "freeze finished at t=" << result.state.t << ", outputs in " << cfg.out_dir
                  << "\n";
    return 0;
}

int run_from_state(const RunConfig& cfg, State state, bool quiet, bool append) {
    // custom-step / resume: evolve an explicit state to t_end
    const StepConfig sc = config_step(cfg);
    RunOutput out(cfg, false, append, quiet);
    const long steps = std::lround((cfg.t_end - state.t) / cfg.s);
    if (steps <= 0) {
        std::cerr << "nothing to do: state already at t >= t_end\n";
        return 1;
    }
    EvolveResult result = evolve(std::move(state), sc, cfg.mg, steps, /*assert_decay=*/false,
                                 false, std::ref(out));
    write_checkpoint((out.dir / "checkpoint.dat").string(), result.state);
    return 0;
}

int run_shear_cmd(const RunConfig& cfg, const CliFlags& flags) {
    ShearRun run;
    run.epsilon = cfg.epsilon;
    run.rho_l = cfg.shear_rho_l;
    run.rho_s = cfg.shear_rho_s;
    run.m = cfg.m;
    run.n = cfg.n;
    run.nucleus_diag_atoms = cfg.nucleus_diag_atoms;
    run.s = cfg.s;
    run.gamma = cfg.gamma;
    run.anneal_t_end = cfg.anneal_t_end;
    run.equil_tol = cfg.equil_tol;
    run.wall_speed = cfg.wall_speed;
    run.phase2_t_end = cfg.phase2_t_end;
    run.mg = cfg.mg;

    RunConfig cfg2 = cfg;
    cfg2.out_dir = (fs::path(cfg.out_dir) / "phase2").string();
    RunOutput out1(cfg, true, false, flags.quiet);
    RunOutput out2(cfg2, true, false, flags.quiet);
    run.observer = std::ref(out1);
    run.observer2 = std::ref(out2);

    ShearResult result = run_shear(run);
    write_checkpoint((out1.dir / "annealed.dat").string(), result.annealed);
    write_checkpoint((out2.dir / "checkpoint.dat").string(), result.final_state);
    if (!flags.quiet)
        std::cout << "anneal " << (result.equilibrated ? "equilibrated" : "hit t_end")
                  << "; phase 2 done (wall speed " << run.wall_speed << ")\n";
    if (flags.extended) {
        // the second wall speed of the qualitative study
        RunConfig cfg3 = cfg;
        cfg3.out_dir = (fs::path(cfg.out_dir) / "phase2_fast").string();
        RunOutput out3(cfg3, true, false, flags.quiet);
        ShearRun fast = run;
        fast.wall_speed = 0.5;
        fast.observer2 = std::ref(out3);
        ShearResult r2 = run_shear_phase2(fast, result.annealed);
        write_checkpoint((out3.dir / "checkpoint.dat").string(), r2.final_state);
    }
    return 0;
}

int run_gradient_flow_cmd(const RunConfig& cfg, bool quiet) {
    const GridSpec grid = config_grid(cfg);
    std::mt19937_64 rng(cfg.seed);
    const CellField rho0 = ic_random_perturbation(grid, cfg.rho_bar, cfg.perturb_amplitude, rng);
    const StepConfig sc = config_step(cfg);
    const auto energy = make_energy(sc.model);

    fs::create_directories(cfg.out_dir);
    {
        std::ofstream echo(fs::path(cfg.out_dir) / "config.echo.cfg");
        echo << echo_config(cfg);
    }
    GradientFlowResult result = run_gradient_flow(*energy, rho0, sc, cfg.mg, cfg.gf_steps);
    SeriesWriter series((fs::path(cfg.out_dir) / "series.csv").string(),
                        {"step", "F", "mass"});
    for (std::size_t k = 0; k < result.F.size(); ++k)
        series.write_row({double(k), result.F[k], result.mass[k]});
    write_snapshot((fs::path(cfg.out_dir) / "final.dat").string(), grid, cfg.s * cfg.gf_steps,
                   {{"rho", &result.rho}});
    if (!quiet)
        std::cout << "gradient flow: F " << result.F.front() << " -> " << result.F.back()
                  << "\n";
    return 0;
}

int cmd_run(int argc, char** argv) {
    if (argc < 3) return usage();
    CliFlags flags;
    if (!parse_flags(argc, argv, 3, flags)) return usage();
    RunConfig cfg = load_config(argv[2]);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.out) cfg.out_dir = *flags.out;
    if (cfg.out_dir.empty()) cfg.out_dir = "out/" + cfg.experiment;

    if (cfg.experiment == "convergence") return run_convergence_cmd(cfg, flags);
    if (cfg.experiment == "freeze") return run_freeze_cmd(cfg, flags.quiet);
    if (cfg.experiment == "shear") return run_shear_cmd(cfg, flags);
    if (cfg.experiment == "gradient-flow") return run_gradient_flow_cmd(cfg, flags.quiet);
    // custom-step
    State state;
    if (!cfg.init_checkpoint.empty()) {
        state = read_checkpoint(cfg.init_checkpoint);
    } else {
        const GridSpec grid = config_grid(cfg);
        std::mt19937_64 rng(cfg.seed);
        state.rho = ic_random_perturbation(grid, cfg.rho_bar, cfg.perturb_amplitude, rng);
        state.w = VelocityField(grid);
    }
    return run_from_state(cfg, std::move(state), flags.quiet, false);
}

int cmd_resume(int argc, char** argv) {
    if (argc < 4) return usage();
    CliFlags flags;
    if (!parse_flags(argc, argv, 4, flags)) return usage();
    RunConfig cfg = load_config(argv[3]);
    if (flags.out) cfg.out_dir = *flags.out;
    if (cfg.out_dir.empty()) cfg.out_dir = "out/" + cfg.experiment;
    State state = read_checkpoint(argv[2]);
    return run_from_state(cfg, std::move(state), flags.quiet, /*append=*/true);
}

int cmd_verify(int argc, char** argv) {
    CliFlags flags;
    if (!parse_flags(argc, argv, 2, flags)) return usage();
    const auto results = verify_all();
    for (const auto& r : results)
        if (!flags.quiet || !r.pass)
            std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
    const bool ok = all_passed(results);
    std::cout << (ok ? "verify: all checks passed\n" : "verify: FAILURES\n");
    return ok ? 0 : 1;
}

int cmd_rates(int argc, char** argv) {
    if (argc < 3) return usage();
    const fs::path dir = argv[2];
    std::vector<int> sizes;
    std::vector<State> finals;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("final_", 0) == 0 && e.path().extension() == ".dat")
            files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        Snapshot snap = read_snapshot(f.string());
        sizes.push_back(snap.grid.m);
        State st;
        st.rho = std::move(snap.fields.at(0).second);
        st.w.u = std::move(snap.fields.at(1).second);
        st.w.v = std::move(snap.fields.at(2).second);
        finals.push_back(std::move(st));
    }
    if (finals.size() < 3) {
        std::cerr << "rates: need at least three final_*.dat fields in " << dir << "\n";
        return 1;
    }
    write_rate_table(std::cout, rates_from_finals(sizes, finals));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    // field-sized temporaries churn through the default mmap threshold
    mallopt(M_MMAP_THRESHOLD, 64 * 1024 * 1024);
    if (argc < 2) return usage();
    const std::string cmd = argv[1];
    try {
        if (cmd == "run") return cmd_run(argc, argv);
        if (cmd == "resume") return cmd_resume(argc, argv);
        if (cmd == "verify") return cmd_verify(argc, argv);
        if (cmd == "rates") return cmd_rates(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return usage();
}
