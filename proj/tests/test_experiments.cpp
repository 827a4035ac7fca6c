#include <cmath>

#include "doctest.h"
#include "hf/experiments.hpp"
#include "test_util.hpp"

using namespace hf;
using test::max_diff;

TEST_CASE("smooth initial data: means and periodicity") {
    SUBCASE("cdft mean sits near the packing-fraction density") {
        const GridSpec g = make_grid(32, 32, 1.0);
        const CellField f = ic_cdft_smooth(g);
        const double mean = field_mass(f) / (g.lx() * g.ly());
        const double rho_o = M_PI / 6.0 * 0.6;
        // perturbations leave the exact residue 0.02/4 - 0.01/4
        CHECK(mean == doctest::Approx(rho_o + 0.0025).epsilon(1e-12));
        CHECK(std::abs(mean - rho_o) <= 0.003);
    }

    SUBCASE("pfc value matches an independent evaluation at one point") {
        const GridSpec g = make_grid(32, 32, 1.0);
        const CellField f = ic_pfc_smooth(g);
        const int i = 5, j = 11;
        const double x = g.x(i), y = g.y(j);
        const double expect =
            std::sqrt(3.0) * (-0.07
                              - 0.02 * std::cos(2 * M_PI * (x - 12) / 32)
                                    * std::sin(2 * M_PI * (y - 1) / 32)
                              + 0.02 * std::pow(std::cos(M_PI * (x + 10) / 32), 2)
                                    * std::pow(std::cos(M_PI * (y + 3) / 32), 2)
                              - 0.01 * std::pow(std::sin(4 * M_PI * x / 32), 2)
                                    * std::pow(std::sin(4 * M_PI * (y - 6) / 32), 2))
            + 0.5;
        CHECK(f(i, j) == doctest::Approx(expect).epsilon(1e-14));
    }

    SUBCASE("fields are 32-periodic") {
        const GridSpec big = make_grid(64, 64, 1.0);  // covers [0,64)
        for (const CellField& f : {ic_cdft_smooth(big), ic_pfc_smooth(big)}) {
            for (int j = 0; j < 16; ++j)
                for (int i = 0; i < 16; ++i)
                    CHECK(f(i, j) == doctest::Approx(f(i + 32, j)).epsilon(1e-13));
        }
    }
}

TEST_CASE("one-mode solid") {
    SUBCASE("printed amplitude at the shear parameters") {
        CHECK(one_mode_amplitude(0.90073, 0.4) == doctest::Approx(-0.8773).epsilon(2e-4));
    }
    SUBCASE("negative discriminant rejected") {
        CHECK_THROWS_AS((void)one_mode_amplitude(1.5 + 1.0, 0.4), std::domain_error);
    }
    SUBCASE("field matches independent evaluation and x-period") {
        const double a = 4.0 * M_PI / std::sqrt(3.0);
        const GridSpec g = make_grid(16, 16, a / 8.0);
        const CellField f = one_mode_field(g, 0.90073, 0.4);
        const double A = one_mode_amplitude(0.90073, 0.4);
        for (int j : {0, 3}) {
            for (int i : {0, 2, 7}) {
                const double x = g.x(i), y = g.y(j);
                const double expect =
                    0.90073 + A * (std::cos(std::sqrt(3.0) / 2.0 * x + M_PI) * std::cos(y / 2.0)
                                   - 0.5 * std::cos(y));
                CHECK(f(i, j) == doctest::Approx(expect).epsilon(1e-14));
            }
        }
        // one lattice constant = 8 cells in x
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < 8; ++i)
                CHECK(f(i, j) == doctest::Approx(f(i + 8, j)).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("nucleus: solid inside the hexagon, liquid outside") {
    BoundarySpec bc;
    bc.type = BoundaryType::Channel;
    const GridSpec g = make_grid(64, 64, shear_lattice_h(), bc);
    const CellField f = build_nucleus(g, 0.90073, 0.72958, 0.4, 5);
    const CellField solid = one_mode_field(g, 0.90073, 0.4);
    // corners are far outside a 5-atom nucleus
    CHECK(f(0, 0) == doctest::Approx(0.72958));
    CHECK(f(63, 63) == doctest::Approx(0.72958));
    // the center cell carries the one-mode value
    CHECK(f(32, 32) == doctest::Approx(solid(32, 32)));
    const long cells = crystal_extent(f, 0.90073, 0.72958);
    CHECK(cells > 0);
    CHECK(cells < long(g.cells()) / 2);
}

TEST_CASE("cauchy errors and rates") {
    SUBCASE("identical nested fields have zero error") {
        const GridSpec gc = make_grid(16, 16, 2.0);
        const GridSpec gf = make_grid(32, 32, 1.0);
        CellField fc(gc), ff(gf);
        for (int j = 0; j < gc.n; ++j)
            for (int i = 0; i < gc.m; ++i)
                fc(i, j) = std::sin(2 * M_PI * gc.x(i) / 32.0) * std::cos(2 * M_PI * gc.y(j) / 32.0);
        for (int j = 0; j < gf.n; ++j)
            for (int i = 0; i < gf.m; ++i)
                ff(i, j) = std::sin(2 * M_PI * gf.x(i) / 32.0) * std::cos(2 * M_PI * gf.y(j) / 32.0);
        CHECK(cauchy_error(fc, ff) <= 1e-14);
    }
    SUBCASE("log ratios") {
        CHECK(rate(4.0e-5, 1.0e-5) == doctest::Approx(2.0));
        CHECK(rate(2.4951e-7, 4.8685e-8) == doctest::Approx(2.3576).epsilon(5e-4));
    }
    SUBCASE("non-nested grids rejected") {
        CHECK_THROWS(cauchy_error(CellField(make_grid(16, 16, 2.0)),
                                  CellField(make_grid(48, 48, 2.0 / 3.0))));
    }
}

TEST_CASE("freeze runs are bit-reproducible for a fixed seed") {
    FreezeRun run;
    run.model = ModelType::PFC;
    run.m = run.n = 16;
    run.Lx = run.Ly = 32.0;
    run.rho_bar = -0.07 * std::sqrt(3.0) + 0.5;
    run.s = 0.05;
    run.t_end = 0.5;  // 10 steps
    run.seed = 2024;
    run.mg.tol_linf = 1e-12;
    run.mg.delta_proj = 0.0;

    const EvolveResult a = run_freeze(run);
    const EvolveResult b = run_freeze(run);
    REQUIRE(a.total.size() == b.total.size());
    for (std::size_t k = 0; k < a.total.size(); ++k) {
        CHECK(a.total[k] == b.total[k]);
        CHECK(a.mass[k] == b.mass[k]);
    }
    CHECK(max_diff(a.state.rho, b.state.rho) == 0.0);
    CHECK(max_diff(a.state.w.u, b.state.w.u) == 0.0);

    // a different seed changes the trajectory
    FreezeRun run2 = run;
    run2.seed = 2025;
    const EvolveResult c = run_freeze(run2);
    CHECK(max_diff(a.state.rho, c.state.rho) > 0.0);
}

TEST_CASE("evolve asserts energy decay and mass conservation") {
    FreezeRun run;
    run.model = ModelType::PFC;
    run.m = run.n = 16;
    run.Lx = run.Ly = 32.0;
    run.rho_bar = -0.07 * std::sqrt(3.0) + 0.5;
    run.s = 0.5;
    run.t_end = 2.5;
    run.seed = 7;
    run.mg.tol_linf = 1e-12;
    run.mg.delta_proj = 0.0;
    const EvolveResult res = run_freeze(run);
    for (std::size_t k = 1; k < res.total.size(); ++k)
        CHECK(res.total[k] <= res.total[k - 1] + 1e-10 * std::abs(res.total[k - 1]));
}

TEST_CASE("shear: uniform channel state stays at equilibrium with resting walls") {
    ShearRun run;
    run.m = run.n = 16;
    run.nucleus_diag_atoms = 1;
    run.s = 0.05;
    run.anneal_t_end = 0.05;  // single probe step
    run.phase2_t_end = 0.25;
    run.wall_speed = 0.0;
    run.mg.tol_linf = 1e-12;
    run.mg.delta_proj = 0.0;

    BoundarySpec bc;
    bc.type = BoundaryType::Channel;
    const GridSpec g = make_grid(16, 16, shear_lattice_h(), bc);
    State uniform;
    uniform.rho = CellField(g, 0.72958);
    uniform.w = VelocityField(g);

    const ShearResult res = run_shear_phase2(run, uniform);
    CHECK(max_diff(res.final_state.rho, uniform.rho) <= 1e-8);
    CHECK(max_abs(res.final_state.w.u) <= 1e-8);
    for (double m2 : res.phase2_mass)
        CHECK(std::abs(m2 - field_mass(uniform.rho)) <= 1e-8 * field_mass(uniform.rho));
}
