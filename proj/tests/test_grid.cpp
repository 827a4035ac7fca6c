#include <cmath>

#include "doctest.h"
#include "hf/grid.hpp"
#include "hf/reference.hpp"
#include "test_util.hpp"

using namespace hf;
using test::max_diff;
using test::random_field;
using test::rel_err;

namespace {

// tiny grids bypass make_grid's multigrid-oriented minimum size
GridSpec tiny_grid(int m, int n, double h, BoundarySpec b = {}) {
    GridSpec g;
    g.m = m;
    g.n = n;
    g.h = h;
    g.boundary = b;
    return g;
}

}  // namespace

TEST_CASE("ghost fill: periodic wrap on a 2x2 field") {
    const GridSpec g = tiny_grid(2, 2, 1.0);
    CellField f(g);
    f(0, 0) = 1.0;  // phi_{1,1}
    f(0, 1) = 2.0;  // phi_{1,2}
    f(1, 0) = 3.0;  // phi_{2,1}
    f(1, 1) = 4.0;  // phi_{2,2}
    const GhostView v(f, GhostKind::Scalar);
    CHECK(v(-1, 0) == 3.0);  // phi_{0,1} = phi_{m,1}
    CHECK(v(2, 0) == 1.0);   // phi_{m+1,1} = phi_{1,1}
    CHECK(v(0, -1) == 2.0);
    CHECK(v(0, 2) == 1.0);
}

TEST_CASE("ghost fill: no-slip wall reflects the tangential velocity") {
    BoundarySpec b;
    b.type = BoundaryType::Channel;
    const GridSpec g = tiny_grid(4, 4, 1.0, b);
    CellField u(g, 0.7);
    const GhostView v(u, GhostKind::VelocityX);
    CHECK(v(1, -1) == doctest::Approx(-0.7));  // u_{i,0} = -u_{i,1}
    CHECK(v(1, 4) == doctest::Approx(-0.7));
    const GhostView vn(u, GhostKind::VelocityY);
    CHECK(vn(1, -1) == doctest::Approx(-0.7));
}

TEST_CASE("ghost fill: moving wall imposes 2 u_wall - interior") {
    BoundarySpec b;
    b.type = BoundaryType::Channel;
    b.u_wall_bottom = -0.5;
    b.u_wall_top = 0.5;
    const GridSpec g = tiny_grid(4, 4, 1.0, b);
    CellField u(g, 0.2);
    const GhostView v(u, GhostKind::VelocityX);
    CHECK(v(0, -1) == doctest::Approx(2.0 * -0.5 - 0.2));
    CHECK(v(0, 4) == doctest::Approx(2.0 * 0.5 - 0.2));
    // scalars copy; x stays periodic
    CellField r(g, 1.3);
    const GhostView rs(r, GhostKind::Scalar);
    CHECK(rs(0, -1) == 1.3);
    CHECK(rs(-1, 2) == 1.3);
}

TEST_CASE("ghost fill: constant field invariant under copy/wrap regimes") {
    for (BoundaryType t : {BoundaryType::Periodic, BoundaryType::NeumannNoFlux}) {
        BoundarySpec b;
        b.type = t;
        const GridSpec g = tiny_grid(4, 4, 0.5, b);
        CellField f(g, 3.25);
        const GhostView v(f, GhostKind::Scalar);
        for (int i = -1; i <= 4; ++i) {
            CHECK(v(i, -1) == 3.25);
            CHECK(v(i, 4) == 3.25);
        }
        CHECK(v(-1, 2) == 3.25);
        CHECK(v(4, 2) == 3.25);
    }
}

TEST_CASE("grad_h: constants, linear ramp, trigonometric eigenfunction") {
    const GridSpec g = make_grid(8, 8, 0.5);
    SUBCASE("constant") {
        CellField c(g, 2.0);
        auto [gx, gy] = grad_h(c);
        CHECK(max_abs(gx) == 0.0);
        CHECK(max_abs(gy) == 0.0);
    }
    SUBCASE("ramp phi = x with periodic wrap rows") {
        CellField f(g);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i) f(i, j) = g.x(i);
        auto [gx, gy] = grad_h(f);
        const double wrap = -(g.lx() - 2.0 * g.h) / (2.0 * g.h);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i) {
                const bool edge = (i == 0 || i == g.m - 1);
                CHECK(gx(i, j) == doctest::Approx(edge ? wrap : 1.0));
            }
        CHECK(max_abs(gy) == 0.0);
    }
    SUBCASE("sine mode") {
        const double k = 2.0 * M_PI / g.lx();
        CellField f(g);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i) f(i, j) = std::sin(k * g.x(i));
        auto [gx, gy] = grad_h(f);
        const double factor = std::sin(k * g.h) / g.h;
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i)
                CHECK(gx(i, j) == doctest::Approx(factor * std::cos(k * g.x(i))).epsilon(1e-12));
        CHECK(max_abs(gy) <= 1e-15);
    }
}

TEST_CASE("div_h: telescoping sum and brute-force oracle") {
    const GridSpec g = make_grid(8, 8, 0.25);
    std::mt19937_64 rng(7);
    VelocityField w(g);
    w.u = random_field(g, rng);
    w.v = random_field(g, rng);
    const CellField d = div_h(w);
    double sum = 0.0;
    for (std::size_t q = 0; q < d.size(); ++q) sum += d.data()[q];
    CHECK(std::abs(sum) <= 1e-12);

    const CellField oracle = ref::divergence(w.u, w.v);
    CHECK(max_diff(d, oracle) <= 1e-14);

    VelocityField c(g);
    c.u = CellField(g, 1.5);
    c.v = CellField(g, -2.5);
    CHECK(max_abs(div_h(c)) == 0.0);
}

TEST_CASE("laplacian_h: spike stencil and eigenfunction") {
    const GridSpec g = make_grid(8, 8, 1.0);
    SUBCASE("unit spike") {
        CellField f(g);
        f(3, 4) = 1.0;
        const CellField lap = laplacian_h(f);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i) {
                const bool center = (i == 3 && j == 4);
                const bool nb = (i == 2 && j == 4) || (i == 4 && j == 4) ||
                                (i == 3 && j == 3) || (i == 3 && j == 5);
                CHECK(lap(i, j) == (center ? -4.0 : nb ? 1.0 : 0.0));
            }
    }
    SUBCASE("sine eigenfunction") {
        const GridSpec g2 = make_grid(16, 16, 0.5);
        const double k = 2.0 * M_PI / g2.lx();
        CellField f(g2);
        for (int j = 0; j < g2.n; ++j)
            for (int i = 0; i < g2.m; ++i) f(i, j) = std::sin(k * g2.x(i));
        const CellField lap = laplacian_h(f);
        const double lam = -2.0 / (g2.h * g2.h) * (1.0 - std::cos(k * g2.h));
        for (int j = 0; j < g2.n; ++j)
            for (int i = 0; i < g2.m; ++i)
                CHECK(lap(i, j) == doctest::Approx(lam * f(i, j)).epsilon(1e-10).scale(1.0));
    }
    SUBCASE("matches reference on random fields") {
        std::mt19937_64 rng(3);
        const CellField f = random_field(g, rng);
        CHECK(max_diff(laplacian_h(f), ref::laplacian(f)) <= 1e-14);
    }
}

TEST_CASE("vorticity: rigid rotation and shear mode") {
    const GridSpec g = make_grid(8, 8, 0.5);
    SUBCASE("rigid rotation, interior cells") {
        VelocityField w(g);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i) {
                w.u(i, j) = -g.y(j);
                w.v(i, j) = g.x(i);
            }
        const CellField om = vorticity(w);
        for (int j = 1; j < g.n - 1; ++j)
            for (int i = 1; i < g.m - 1; ++i) CHECK(om(i, j) == doctest::Approx(2.0));
    }
    SUBCASE("shear mode") {
        const double k = 2.0 * M_PI / g.ly();
        VelocityField w(g);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i) w.u(i, j) = std::sin(k * g.y(j));
        const CellField om = vorticity(w);
        const double factor = -std::sin(k * g.h) / g.h;
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i)
                CHECK(om(i, j) ==
                      doctest::Approx(factor * std::cos(k * g.y(j))).epsilon(1e-12).scale(1.0));
    }
    SUBCASE("constant velocity") {
        VelocityField w(g);
        w.u = CellField(g, 0.3);
        w.v = CellField(g, -0.7);
        CHECK(max_abs(vorticity(w)) == 0.0);
    }
}

TEST_CASE("inner products and norms") {
    const GridSpec g = make_grid(4, 4, 0.75);
    CellField ones(g, 1.0);
    CHECK(inner(ones, ones) == doctest::Approx(g.lx() * g.ly()).epsilon(1e-14));
    CellField c(g, -2.5);
    CHECK(norm2(c) == doctest::Approx(2.5 * std::sqrt(g.lx() * g.ly())).epsilon(1e-14));

    std::mt19937_64 rng(11);
    const CellField a = random_field(g, rng);
    const CellField b = random_field(g, rng);
    double s = 0.0, s4 = 0.0;
    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            s += a(i, j) * b(i, j);
            s4 += a(i, j) * a(i, j) * a(i, j) * a(i, j);
        }
    CHECK(rel_err(inner(a, b), g.h * g.h * s) <= 1e-14);
    CHECK(rel_err(norm4_pow(a), g.h * g.h * s4) <= 1e-14);
}

TEST_CASE("operator linearity and Green's second identity") {
    const GridSpec g = make_grid(12, 8, 0.5);
    std::mt19937_64 rng(5);
    const CellField a = random_field(g, rng);
    const CellField b = random_field(g, rng);
    CellField combo(g);
    for (std::size_t q = 0; q < combo.size(); ++q)
        combo.data()[q] = 2.0 * a.data()[q] - 3.0 * b.data()[q];
    const CellField la = laplacian_h(a);
    const CellField lb = laplacian_h(b);
    const CellField lc = laplacian_h(combo);
    for (std::size_t q = 0; q < combo.size(); ++q)
        CHECK(lc.data()[q] ==
              doctest::Approx(2.0 * la.data()[q] - 3.0 * lb.data()[q]).epsilon(1e-12));

    CHECK(rel_err(inner(a, lb), inner(la, b)) <= 1e-12);
}

TEST_CASE("grid invariants") {
    CHECK_THROWS(make_grid(2, 8, 1.0));
    CHECK_THROWS(make_grid(8, 8, -1.0));
    const GridSpec g = make_grid(8, 4, 0.25);
    CHECK(g.lx() == doctest::Approx(8 * 0.25));
    CHECK(g.ly() == doctest::Approx(4 * 0.25));
    CHECK_THROWS(inner(CellField(g), CellField(make_grid(4, 4, 0.25))));
}
