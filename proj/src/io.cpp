#include "hf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <set>
#include <sstream>

namespace hf {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct RawConfig {
    // section.key -> (value, line)
    std::map<std::string, std::pair<std::string, int>> kv;
    std::string name;

    std::optional<std::string> take(const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second.first;
        kv.erase(it);
        return v;
    }
};

RawConfig parse_raw(const std::string& text, const std::string& name) {
    RawConfig raw;
    raw.name = name;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(name + ":" + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || section.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": key outside a section");
        const std::string full = section + "." + key;
        if (raw.kv.count(full))
            throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key " + full);
        raw.kv[full] = {value, lineno};
    }
    return raw;
}

double to_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("config: field '" + key + "' is not a number: '" + v + "'");
    }
}

long to_long(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (...) {
        throw ConfigError("config: field '" + key + "' is not an integer: '" + v + "'");
    }
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: field '" + key + "' is not a boolean: '" + v + "'");
}

void require_positive_value(double v, const std::string& key) {
    if (!(v > 0.0)) throw ConfigError("config: field '" + key + "' must be positive");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& name) {
    RawConfig raw = parse_raw(text, name);
    RunConfig cfg;

    // required choices first
    auto exp = raw.take("run.experiment");
    if (!exp) throw ConfigError(name + ": missing run.experiment");
    cfg.experiment = *exp;
    const std::set<std::string> kinds = {"convergence", "freeze", "shear", "gradient-flow",
                                         "custom-step"};
    if (!kinds.count(cfg.experiment))
        throw ConfigError("config: unknown experiment '" + cfg.experiment + "'");

    auto model = raw.take("run.model");
    if (!model) throw ConfigError(name + ": missing run.model");
    if (*model == "cdft") cfg.model = ModelType::CDFT;
    else if (*model == "pfc") cfg.model = ModelType::PFC;
    else throw ConfigError("config: unknown model '" + *model + "'");
    if (cfg.experiment == "shear" && cfg.model != ModelType::PFC)
        throw ConfigError("config: shear runs use the pfc model");

    // defaults by model and experiment
    const bool cdft = cfg.model == ModelType::CDFT;
    cfg.mg.tol_linf = cdft ? 1e-14 : 1e-12;
    cfg.mg.delta_proj = cdft ? 1e-10 : 0.0;
    if (cfg.experiment == "freeze" || cfg.experiment == "custom-step") {
        if (cdft) {
            cfg.m = cfg.n = 128;
            cfg.Lx = cfg.Ly = 17.0;
            cfg.s = 0.02;
            cfg.t_end = 2400.0;
            cfg.rho_bar = M_PI / 6.0 * 0.6;
        } else {
            cfg.m = cfg.n = 128;
            cfg.Lx = cfg.Ly = 32.0;
            cfg.s = 0.01;
            cfg.t_end = 1600.0;
            cfg.rho_bar = -0.07 * std::sqrt(3.0) + 0.5;
        }
    } else if (cfg.experiment == "shear") {
        cfg.epsilon = 0.4;
        cfg.m = cfg.n = 256;
        cfg.s = 0.02;
        cfg.Lx = cfg.Ly = 256 * shear_lattice_h();
        cfg.boundary.type = BoundaryType::Channel;
        cfg.pgm_min = 0.0;
        cfg.pgm_max = 2.9;
    } else if (cfg.experiment == "convergence") {
        cfg.m = cfg.n = 0;  // grids come from conv_sizes
        cfg.Lx = cfg.Ly = 32.0;
        cfg.nu = 1.0;
        cfg.t_end = cfg.conv_t_final;
    } else if (cfg.experiment == "gradient-flow") {
        cfg.m = cfg.n = 32;
        if (cdft) {
            cfg.Lx = cfg.Ly = 17.0;
            cfg.rho_bar = M_PI / 6.0 * 0.6;
        } else {
            cfg.Lx = cfg.Ly = 32.0;
            cfg.rho_bar = -0.07 * std::sqrt(3.0) + 0.5;
        }
        cfg.s = 1.0;
    }

    // overrides from the file
    if (auto v = raw.take("run.seed")) cfg.seed = (unsigned long long)to_long(*v, "run.seed");
    if (auto v = raw.take("model.nu")) cfg.nu = to_double(*v, "model.nu");
    if (auto v = raw.take("model.epsilon")) cfg.epsilon = to_double(*v, "model.epsilon");

    if (auto v = raw.take("grid.m")) cfg.m = int(to_long(*v, "grid.m"));
    if (auto v = raw.take("grid.n")) cfg.n = int(to_long(*v, "grid.n"));
    if (auto v = raw.take("grid.Lx")) cfg.Lx = to_double(*v, "grid.Lx");
    if (auto v = raw.take("grid.Ly")) cfg.Ly = to_double(*v, "grid.Ly");
    if (auto v = raw.take("grid.boundary")) {
        if (*v == "periodic") cfg.boundary.type = BoundaryType::Periodic;
        else if (*v == "neumann") cfg.boundary.type = BoundaryType::NeumannNoFlux;
        else if (*v == "channel") cfg.boundary.type = BoundaryType::Channel;
        else throw ConfigError("config: unknown boundary '" + *v + "'");
    }
    if (auto v = raw.take("grid.u_wall_bottom"))
        cfg.boundary.u_wall_bottom = to_double(*v, "grid.u_wall_bottom");
    if (auto v = raw.take("grid.u_wall_top"))
        cfg.boundary.u_wall_top = to_double(*v, "grid.u_wall_top");

    if (auto v = raw.take("stepping.s")) cfg.s = to_double(*v, "stepping.s");
    if (auto v = raw.take("stepping.t_end")) cfg.t_end = to_double(*v, "stepping.t_end");
    if (auto v = raw.take("stepping.gamma")) cfg.gamma = to_double(*v, "stepping.gamma");

    if (auto v = raw.take("multigrid.tol_linf")) cfg.mg.tol_linf = to_double(*v, "multigrid.tol_linf");
    if (auto v = raw.take("multigrid.max_cycles"))
        cfg.mg.max_cycles = int(to_long(*v, "multigrid.max_cycles"));
    if (auto v = raw.take("multigrid.w_damp")) cfg.mg.w_damp = to_double(*v, "multigrid.w_damp");
    if (auto v = raw.take("multigrid.delta_proj"))
        cfg.mg.delta_proj = to_double(*v, "multigrid.delta_proj");
    if (auto v = raw.take("multigrid.pre_smooth"))
        cfg.mg.pre_smooth = int(to_long(*v, "multigrid.pre_smooth"));
    if (auto v = raw.take("multigrid.post_smooth"))
        cfg.mg.post_smooth = int(to_long(*v, "multigrid.post_smooth"));
    if (auto v = raw.take("multigrid.coarsest_size"))
        cfg.mg.coarsest_size = int(to_long(*v, "multigrid.coarsest_size"));
    if (auto v = raw.take("multigrid.coarsest_sweeps"))
        cfg.mg.coarsest_sweeps = int(to_long(*v, "multigrid.coarsest_sweeps"));

    if (auto v = raw.take("initial.rho_bar")) cfg.rho_bar = to_double(*v, "initial.rho_bar");
    if (auto v = raw.take("initial.perturb_amplitude"))
        cfg.perturb_amplitude = to_double(*v, "initial.perturb_amplitude");
    if (auto v = raw.take("initial.checkpoint")) cfg.init_checkpoint = *v;

    if (auto v = raw.take("convergence.sizes")) {
        cfg.conv_sizes.clear();
        std::istringstream ss(*v);
        int x;
        while (ss >> x) cfg.conv_sizes.push_back(x);
        if (cfg.conv_sizes.size() < 3)
            throw ConfigError("config: convergence.sizes needs at least three grids");
    }
    if (auto v = raw.take("convergence.t_final"))
        cfg.conv_t_final = to_double(*v, "convergence.t_final");
    if (auto v = raw.take("convergence.s_coeff"))
        cfg.conv_s_coeff = to_double(*v, "convergence.s_coeff");

    if (auto v = raw.take("shear.rho_l")) cfg.shear_rho_l = to_double(*v, "shear.rho_l");
    if (auto v = raw.take("shear.rho_s")) cfg.shear_rho_s = to_double(*v, "shear.rho_s");
    if (auto v = raw.take("shear.nucleus_diag_atoms"))
        cfg.nucleus_diag_atoms = int(to_long(*v, "shear.nucleus_diag_atoms"));
    if (auto v = raw.take("shear.anneal_t_end"))
        cfg.anneal_t_end = to_double(*v, "shear.anneal_t_end");
    if (auto v = raw.take("shear.equil_tol")) cfg.equil_tol = to_double(*v, "shear.equil_tol");
    if (auto v = raw.take("shear.wall_speed")) cfg.wall_speed = to_double(*v, "shear.wall_speed");
    if (auto v = raw.take("shear.phase2_t_end"))
        cfg.phase2_t_end = to_double(*v, "shear.phase2_t_end");

    if (auto v = raw.take("gradient_flow.steps")) cfg.gf_steps = to_long(*v, "gradient_flow.steps");

    if (auto v = raw.take("output.dir")) cfg.out_dir = *v;
    if (auto v = raw.take("output.series_every")) cfg.series_every = to_long(*v, "output.series_every");
    if (auto v = raw.take("output.snapshot_every"))
        cfg.snapshot_every = to_long(*v, "output.snapshot_every");
    if (auto v = raw.take("output.pgm")) cfg.pgm = to_bool(*v, "output.pgm");
    if (auto v = raw.take("output.pgm_min")) cfg.pgm_min = to_double(*v, "output.pgm_min");
    if (auto v = raw.take("output.pgm_max")) cfg.pgm_max = to_double(*v, "output.pgm_max");

    // the channel geometry fixes the lattice spacing h = pi/(2 sqrt 3)
    if (cfg.experiment == "shear") {
        cfg.Lx = cfg.m * shear_lattice_h();
        cfg.Ly = cfg.n * shear_lattice_h();
    }

    // no silent typo acceptance
    if (!raw.kv.empty()) {
        const auto& [key, vl] = *raw.kv.begin();
        throw ConfigError(name + ":" + std::to_string(vl.second) + ": unknown key '" + key + "'");
    }

    // validation
    if (cfg.experiment != "convergence") {
        if (cfg.m < 4 || cfg.n < 4) throw ConfigError("config: grid.m and grid.n must be >= 4");
        require_positive_value(cfg.Lx, "grid.Lx");
        require_positive_value(cfg.Ly, "grid.Ly");
        const double hx = cfg.Lx / cfg.m, hy = cfg.Ly / cfg.n;
        if (std::abs(hx - hy) > 1e-12 * hx)
            throw ConfigError("config: grid spacing must be uniform (Lx/m == Ly/n)");
        require_positive_value(cfg.s, "stepping.s");
    }
    if (cfg.experiment == "freeze" || cfg.experiment == "custom-step")
        require_positive_value(cfg.t_end, "stepping.t_end");
    require_positive_value(cfg.gamma, "stepping.gamma");
    if (cdft) require_positive_value(cfg.nu, "model.nu");
    require_positive_value(cfg.mg.tol_linf, "multigrid.tol_linf");
    if (cfg.mg.w_damp < 0.0 || cfg.mg.w_damp >= 1.0)
        throw ConfigError("config: multigrid.w_damp must lie in [0, 1)");
    if (cfg.mg.delta_proj < 0.0) throw ConfigError("config: multigrid.delta_proj must be >= 0");
    if (cfg.mg.max_cycles < 1) throw ConfigError("config: multigrid.max_cycles must be >= 1");
    if (cfg.series_every < 1) throw ConfigError("config: output.series_every must be >= 1");
    if (cfg.snapshot_every < 0) throw ConfigError("config: output.snapshot_every must be >= 0");
    if (cfg.experiment == "freeze" && !(cfg.rho_bar > 0.0) && cdft)
        throw ConfigError("config: initial.rho_bar must be positive for cdft");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::string echo_config(const RunConfig& cfg) {
    std::ostringstream o;
    o.precision(17);
    o << "[run]\n";
    o << "experiment = " << cfg.experiment << "\n";
    o << "model = " << (cfg.model == ModelType::CDFT ? "cdft" : "pfc") << "\n";
    o << "seed = " << cfg.seed << "\n";
    o << "\n[model]\n";
    o << "nu = " << cfg.nu << "\n";
    o << "epsilon = " << cfg.epsilon << "\n";
    o << "\n[grid]\n";
    o << "m = " << cfg.m << "\n";
    o << "n = " << cfg.n << "\n";
    o << "Lx = " << cfg.Lx << "\n";
    o << "Ly = " << cfg.Ly << "\n";
    const char* b = cfg.boundary.type == BoundaryType::Periodic ? "periodic"
                    : cfg.boundary.type == BoundaryType::NeumannNoFlux ? "neumann" : "channel";
    o << "boundary = " << b << "\n";
    o << "u_wall_bottom = " << cfg.boundary.u_wall_bottom << "\n";
    o << "u_wall_top = " << cfg.boundary.u_wall_top << "\n";
    o << "\n[stepping]\n";
    o << "s = " << cfg.s << "\n";
    o << "t_end = " << cfg.t_end << "\n";
    o << "gamma = " << cfg.gamma << "\n";
    o << "\n[multigrid]\n";
    o << "tol_linf = " << cfg.mg.tol_linf << "\n";
    o << "max_cycles = " << cfg.mg.max_cycles << "\n";
    o << "w_damp = " << cfg.mg.w_damp << "\n";
    o << "delta_proj = " << cfg.mg.delta_proj << "\n";
    o << "pre_smooth = " << cfg.mg.pre_smooth << "\n";
    o << "post_smooth = " << cfg.mg.post_smooth << "\n";
    o << "coarsest_size = " << cfg.mg.coarsest_size << "\n";
    o << "coarsest_sweeps = " << cfg.mg.coarsest_sweeps << "\n";
    o << "\n[initial]\n";
    o << "rho_bar = " << cfg.rho_bar << "\n";
    o << "perturb_amplitude = " << cfg.perturb_amplitude << "\n";
    if (!cfg.init_checkpoint.empty()) o << "checkpoint = " << cfg.init_checkpoint << "\n";
    o << "\n[convergence]\n";
    o << "sizes =";
    for (int s : cfg.conv_sizes) o << " " << s;
    o << "\n";
    o << "t_final = " << cfg.conv_t_final << "\n";
    o << "s_coeff = " << cfg.conv_s_coeff << "\n";
    o << "\n[shear]\n";
    o << "rho_l = " << cfg.shear_rho_l << "\n";
    o << "rho_s = " << cfg.shear_rho_s << "\n";
    o << "nucleus_diag_atoms = " << cfg.nucleus_diag_atoms << "\n";
    o << "anneal_t_end = " << cfg.anneal_t_end << "\n";
    o << "equil_tol = " << cfg.equil_tol << "\n";
    o << "wall_speed = " << cfg.wall_speed << "\n";
    o << "phase2_t_end = " << cfg.phase2_t_end << "\n";
    o << "\n[gradient_flow]\n";
    o << "steps = " << cfg.gf_steps << "\n";
    o << "\n[output]\n";
    if (!cfg.out_dir.empty()) o << "dir = " << cfg.out_dir << "\n";
    o << "series_every = " << cfg.series_every << "\n";
    o << "snapshot_every = " << cfg.snapshot_every << "\n";
    o << "pgm = " << (cfg.pgm ? "true" : "false") << "\n";
    o << "pgm_min = " << cfg.pgm_min << "\n";
    o << "pgm_max = " << cfg.pgm_max << "\n";
    return o.str();
}

GridSpec config_grid(const RunConfig& cfg) {
    return make_grid(cfg.m, cfg.n, cfg.Lx / cfg.m, cfg.boundary);
}

StepConfig config_step(const RunConfig& cfg) {
    StepConfig sc;
    sc.s = cfg.s;
    sc.gamma = cfg.gamma;
    if (cfg.model == ModelType::CDFT) {
        GridSpec g = config_grid(cfg);
        g.boundary = BoundarySpec{};  // kernels live on the periodic torus
        sc.model = ModelSpec::cdft(std::make_shared<KernelSpec>(build_kernel(g, cfg.nu)));
    } else {
        sc.model = ModelSpec::pfc_epsilon(cfg.epsilon);
    }
    return sc;
}

// --- outputs -----------------------------------------------------------------

SeriesWriter::SeriesWriter(const std::string& path, const std::vector<std::string>& columns,
                           bool append)
    : path_(path), columns_(columns.size()) {
    const bool exists = std::filesystem::exists(path);
    out_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open series file: " + path);
    if (!append || !exists) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out_ << (c ? "," : "") << columns[c];
        out_ << "\n";
    }
}

void SeriesWriter::write_row(const std::vector<double>& values) {
    if (values.size() != columns_)
        throw std::runtime_error("series row has wrong column count: " + path_);
    out_.precision(17);
    for (std::size_t c = 0; c < values.size(); ++c) out_ << (c ? "," : "") << values[c];
    out_ << "\n";
    out_.flush();
}

namespace {

void write_doubles(std::ostream& out, const double* p, std::size_t count) {
    out.write(reinterpret_cast<const char*>(p), std::streamsize(count * sizeof(double)));
}

void read_doubles(std::istream& in, double* p, std::size_t count) {
    in.read(reinterpret_cast<char*>(p), std::streamsize(count * sizeof(double)));
    if (!in) throw std::runtime_error("truncated binary payload");
}

int boundary_code(const BoundarySpec& b) { return int(b.type); }

BoundarySpec boundary_from_code(int code, double uwb, double uwt) {
    BoundarySpec b;
    if (code < 0 || code > 2) throw std::runtime_error("bad boundary code");
    b.type = BoundaryType(code);
    b.u_wall_bottom = uwb;
    b.u_wall_top = uwt;
    return b;
}

}  // namespace

void write_snapshot(const std::string& path, const GridSpec& grid, double t,
                    const std::vector<std::pair<std::string, const CellField*>>& fields) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path);
    out << "hf-snapshot 1\n";
    out << "m " << grid.m << "\nn " << grid.n << "\n";
    out.precision(17);
    out << "h " << grid.h << "\nt " << t << "\n";
    out << "boundary " << boundary_code(grid.boundary) << "\n";
    out << "fields";
    for (const auto& [name, f] : fields) out << " " << name;
    out << "\nbinary\n";
    // authoritative doubles: h, t, walls, then the field payloads
    const double head[4] = {grid.h, t, grid.boundary.u_wall_bottom, grid.boundary.u_wall_top};
    write_doubles(out, head, 4);
    for (const auto& [name, f] : fields) {
        if (!f->grid().same_mesh(grid) && !(f->m() == grid.m && f->n() == grid.n))
            throw std::runtime_error("snapshot field on a different grid: " + name);
        write_doubles(out, f->data(), f->size());
    }
    if (!out) throw std::runtime_error("snapshot write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "hf-snapshot" || version != 1)
        throw std::runtime_error("not a snapshot file: " + path);
    std::string key;
    int m = 0, n = 0, bcode = 0;
    std::vector<std::string> names;
    while (in >> key) {
        if (key == "m") in >> m;
        else if (key == "n") in >> n;
        else if (key == "h" || key == "t") { double ignored; in >> ignored; }
        else if (key == "boundary") in >> bcode;
        else if (key == "fields") {
            std::string line;
            std::getline(in, line);
            std::istringstream ss(line);
            std::string f;
            while (ss >> f) names.push_back(f);
        } else if (key == "binary") {
            break;
        } else {
            throw std::runtime_error("unknown snapshot header key: " + key);
        }
    }
    in.get();  // newline after "binary"
    double head[4];
    read_doubles(in, head, 4);
    Snapshot snap;
    snap.grid = make_grid(m, n, head[0], boundary_from_code(bcode, head[2], head[3]));
    snap.t = head[1];
    for (const std::string& name : names) {
        CellField f(snap.grid);
        read_doubles(in, f.data(), f.size());
        snap.fields.emplace_back(name, std::move(f));
    }
    return snap;
}

void write_checkpoint(const std::string& path, const State& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    const GridSpec& g = state.rho.grid();
    out << "hf-checkpoint 1\n";
    out << "m " << g.m << "\nn " << g.n << "\nk " << state.k << "\n";
    out << "boundary " << boundary_code(g.boundary) << "\n";
    out << "binary\n";
    const double head[4] = {g.h, state.t, g.boundary.u_wall_bottom, g.boundary.u_wall_top};
    write_doubles(out, head, 4);
    write_doubles(out, state.rho.data(), state.rho.size());
    write_doubles(out, state.w.u.data(), state.w.u.size());
    write_doubles(out, state.w.v.data(), state.w.v.size());
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

State read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "hf-checkpoint" || version != 1)
        throw std::runtime_error("not a checkpoint file: " + path);
    std::string key;
    int m = 0, n = 0, bcode = 0;
    long k = 0;
    while (in >> key) {
        if (key == "m") in >> m;
        else if (key == "n") in >> n;
        else if (key == "k") in >> k;
        else if (key == "boundary") in >> bcode;
        else if (key == "binary") break;
        else throw std::runtime_error("unknown checkpoint header key: " + key);
    }
    in.get();
    double head[4];
    read_doubles(in, head, 4);
    State st;
    const GridSpec g = make_grid(m, n, head[0], boundary_from_code(bcode, head[2], head[3]));
    st.rho = CellField(g);
    st.w = VelocityField(g);
    st.t = head[1];
    st.k = k;
    read_doubles(in, st.rho.data(), st.rho.size());
    read_doubles(in, st.w.u.data(), st.w.u.size());
    read_doubles(in, st.w.v.data(), st.w.v.size());
    return st;
}

void write_pgm(const std::string& path, const CellField& rho, double lo, double hi) {
    if (!(hi > lo)) throw std::invalid_argument("write_pgm: empty value range");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open pgm for writing: " + path);
    const int m = rho.m(), n = rho.n();
    out << "P5\n" << m << " " << n << "\n255\n";
    std::vector<unsigned char> row(m);
    for (int j = n - 1; j >= 0; --j) {  // top row first
        for (int i = 0; i < m; ++i) {
            double v = (rho(i, j) - lo) / (hi - lo);
            v = std::clamp(v, 0.0, 1.0);
            row[i] = (unsigned char)std::lround(v * 255.0);
        }
        out.write(reinterpret_cast<const char*>(row.data()), m);
    }
    if (!out) throw std::runtime_error("pgm write failed: " + path);
}

}  // namespace hf
