#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "hf/io.hpp"
#include "test_util.hpp"

using namespace hf;
using test::max_diff;
using test::random_field;

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("hf_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

}  // namespace

TEST_CASE("config: minimal freeze file fills the documented defaults") {
    const RunConfig cfg = parse_config_text(
        "[run]\n"
        "experiment = freeze\n"
        "model = cdft\n"
        "[model]\n"
        "nu = 2.362\n");
    CHECK(cfg.m == 128);
    CHECK(cfg.n == 128);
    CHECK(cfg.Lx == doctest::Approx(17.0));
    CHECK(cfg.s == doctest::Approx(0.02));
    CHECK(cfg.gamma == doctest::Approx(2.0));
    CHECK(cfg.mg.tol_linf == doctest::Approx(1e-14));
    CHECK(cfg.mg.delta_proj == doctest::Approx(1e-10));
    CHECK(cfg.mg.w_damp == doctest::Approx(0.5));
    CHECK(cfg.rho_bar == doctest::Approx(M_PI / 6.0 * 0.6));

    const RunConfig pfc = parse_config_text(
        "[run]\nexperiment = freeze\nmodel = pfc\n");
    CHECK(pfc.mg.tol_linf == doctest::Approx(1e-12));
    CHECK(pfc.mg.delta_proj == 0.0);
    CHECK(pfc.Lx == doctest::Approx(32.0));
    CHECK(pfc.s == doctest::Approx(0.01));
}

TEST_CASE("config: validation errors name the field") {
    CHECK_THROWS_WITH_AS(
        (void)parse_config_text("[run]\nexperiment = freeze\nmodel = cdft\n"
                                "[stepping]\ns = -1\n"),
        doctest::Contains("stepping.s"), ConfigError);
    CHECK_THROWS_WITH_AS(
        (void)parse_config_text("[run]\nexperiment = freeze\nmodel = cdft\n"
                                "[stepping]\nsz = 1\n"),
        doctest::Contains("stepping.sz"), ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("[run]\nexperiment = nope\nmodel = cdft\n"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("key = 1\n"), ConfigError);
}

TEST_CASE("config: load -> echo -> load round trip") {
    const RunConfig a = parse_config_text(
        "[run]\nexperiment = shear\nmodel = pfc\nseed = 99\n"
        "[grid]\nm = 64\nn = 64\nLx = 58.0479867919002\nLy = 58.0479867919002\n"
        "boundary = channel\n"
        "[shear]\nnucleus_diag_atoms = 5\nanneal_t_end = 200\n"
        "[output]\ndir = out/x\n");
    const RunConfig b = parse_config_text(echo_config(a), "echo");
    CHECK(echo_config(a) == echo_config(b));
    CHECK(b.nucleus_diag_atoms == 5);
    CHECK(b.seed == 99);
    CHECK(b.boundary.type == BoundaryType::Channel);
}

TEST_CASE("checkpoint round trip is bit exact") {
    TempDir tmp;
    BoundarySpec bc;
    bc.type = BoundaryType::Channel;
    bc.u_wall_top = 0.1;
    bc.u_wall_bottom = -0.1;
    const GridSpec g = make_grid(8, 12, 0.37, bc);
    std::mt19937_64 rng(131);
    State st;
    st.rho = random_field(g, rng, 0.1, 2.0);
    st.w = VelocityField(g);
    st.w.u = random_field(g, rng);
    st.w.v = random_field(g, rng);
    st.t = 123.4567890123456789;
    st.k = 424242;

    const std::string path = (tmp.path / "state.dat").string();
    write_checkpoint(path, st);
    const State back = read_checkpoint(path);
    CHECK(back.t == st.t);
    CHECK(back.k == st.k);
    CHECK(back.rho.grid().h == g.h);
    CHECK(back.rho.grid().boundary.u_wall_top == 0.1);
    CHECK(max_diff(back.rho, st.rho) == 0.0);
    CHECK(max_diff(back.w.u, st.w.u) == 0.0);
    CHECK(max_diff(back.w.v, st.w.v) == 0.0);
}

TEST_CASE("snapshot round trip is bit exact") {
    TempDir tmp;
    const GridSpec g = make_grid(16, 8, 0.625);
    std::mt19937_64 rng(137);
    const CellField rho = random_field(g, rng, 0.0, 3.0);
    const CellField u = random_field(g, rng);
    const std::string path = (tmp.path / "snap.dat").string();
    write_snapshot(path, g, 7.25, {{"rho", &rho}, {"u", &u}});
    const Snapshot snap = read_snapshot(path);
    CHECK(snap.t == 7.25);
    CHECK(snap.grid.m == 16);
    CHECK(snap.fields.size() == 2);
    CHECK(snap.fields[0].first == "rho");
    CHECK(max_diff(snap.fields[0].second, rho) == 0.0);
    CHECK(max_diff(snap.fields[1].second, u) == 0.0);
}

TEST_CASE("pgm: linear map endpoints") {
    TempDir tmp;
    const GridSpec g = make_grid(4, 4, 1.0);
    CellField rho(g, 2.9);
    const std::string path = (tmp.path / "x.pgm").string();
    write_pgm(path, rho, 0.0, 2.9);

    std::ifstream in(path, std::ios::binary);
    std::string magic;
    int w, h, maxv;
    in >> magic >> w >> h >> maxv;
    CHECK(magic == "P5");
    CHECK(w == 4);
    CHECK(maxv == 255);
    in.get();
    for (int q = 0; q < 16; ++q) CHECK(in.get() == 255);

    CellField zero(g, 0.0);
    write_pgm(path, zero, 0.0, 2.9);
    std::ifstream in2(path, std::ios::binary);
    in2 >> magic >> w >> h >> maxv;
    in2.get();
    for (int q = 0; q < 16; ++q) CHECK(in2.get() == 0);
}

TEST_CASE("series writer: header, zero kinetic column, append mode") {
    TempDir tmp;
    const std::string path = (tmp.path / "series.csv").string();
    {
        SeriesWriter w(path, {"time", "mass", "kinetic"});
        w.write_row({0.0, 91.0, 0.0});
        w.write_row({0.02, 91.0, 0.0});
    }
    {
        SeriesWriter w(path, {"time", "mass", "kinetic"}, /*append=*/true);
        w.write_row({0.04, 91.0, 0.0});
    }
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "time,mass,kinetic");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(line.substr(line.size() - 2) == ",0");  // kinetic column
    }
    CHECK(rows == 3);

    SeriesWriter w2((tmp.path / "bad.csv").string(), {"a", "b"});
    CHECK_THROWS(w2.write_row({1.0}));
}
