#include <cmath>

#include "doctest.h"
#include "hf/dft.hpp"
#include "hf/kernel.hpp"
#include "test_util.hpp"

using namespace hf;
using test::max_diff;
using test::random_field;
using test::rel_err;

TEST_CASE("dft: inverse undoes forward, power-of-two and odd sizes") {
    std::mt19937_64 rng(17);
    for (auto [m, n] : {std::pair{16, 16}, {12, 20}, {7, 9}}) {
        Dft2 dft(m, n);
        std::vector<cplx> a(std::size_t(m) * n);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (auto& z : a) z = cplx(d(rng), d(rng));
        const std::vector<cplx> orig = a;
        dft.forward(a);
        dft.inverse(a);
        double worst = 0.0;
        for (std::size_t q = 0; q < a.size(); ++q) worst = std::max(worst, std::abs(a[q] - orig[q]));
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("dft: matches the direct transform definition on a pow2 size") {
    // radix-2 path against the O(N^2) sum it replaces
    const int n = 8;
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<cplx> x(n);
    for (auto& z : x) z = cplx(d(rng), d(rng));
    std::vector<cplx> fast = x;
    Dft1 plan(n);
    plan.transform(fast.data(), -1);
    for (int k = 0; k < n; ++k) {
        cplx s(0.0, 0.0);
        for (int j = 0; j < n; ++j)
            s += x[j] * std::polar(1.0, -2.0 * M_PI * j * k / n);
        CHECK(std::abs(fast[k] - s) <= 1e-12);
    }
}

TEST_CASE("build_kernel: origin value, evenness, negative mass") {
    const GridSpec g = make_grid(128, 128, 17.0 / 128);
    const KernelSpec k = build_kernel(g, 2.362);
    CHECK(k.samples(0, 0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));

    for (int j = 0; j < g.n; ++j)
        for (int i = 0; i < g.m; ++i) {
            const int mi = (g.m - i) % g.m, mj = (g.n - j) % g.n;
            CHECK(k.samples(i, j) == k.samples(mi, mj));
        }

    // direct-summation oracle for (J*1)
    double sum = 0.0;
    for (std::size_t q = 0; q < k.samples.size(); ++q) sum += k.samples.data()[q];
    CHECK(k.j_mass == doctest::Approx(g.h * g.h * sum).epsilon(1e-14));
    CHECK(k.j_mass < 0.0);
    CHECK(k.je_mass >= 0.0);

    // clamp split
    for (std::size_t q = 0; q < k.samples.size(); ++q) {
        CHECK(k.samples_e.data()[q] >= 0.0);
        CHECK(k.samples_c.data()[q] >= 0.0);
        CHECK(k.samples.data()[q] ==
              doctest::Approx(k.samples_c.data()[q] - k.samples_e.data()[q]).epsilon(1e-15));
    }
}

TEST_CASE("build_kernel: rejects positive-mass kernels unless relaxed") {
    // coarse sampling of the nu=1 kernel on [0,32)^2 leaves only the positive peak
    const GridSpec g = make_grid(16, 16, 2.0);
    CHECK_THROWS_AS((void)build_kernel(g, 1.0), std::invalid_argument);
    const KernelSpec k = build_kernel(g, 1.0, false);
    CHECK(k.j_mass > 0.0);
}

TEST_CASE("convolve: identity kernel, constants, direct oracle") {
    const GridSpec g = make_grid(16, 16, 0.5);
    std::mt19937_64 rng(29);

    SUBCASE("discrete identity kernel reproduces the field") {
        CellField id(g);
        id(0, 0) = 1.0 / (g.h * g.h);
        const KernelSpec k = build_kernel_from_samples(g, id);
        const CellField rho = random_field(g, rng);
        CHECK(max_diff(convolve(k, rho), rho) <= 1e-12);
        CHECK(max_diff(convolve_direct(k, rho), rho) <= 1e-12);
    }

    SUBCASE("constant field maps to j_mass times the constant") {
        const KernelSpec k = build_kernel(g, 2.362);
        CellField c(g, 1.7);
        const CellField out = convolve(k, c);
        for (std::size_t q = 0; q < out.size(); ++q)
            CHECK(out.data()[q] == doctest::Approx(1.7 * k.j_mass).epsilon(1e-12));
    }

    SUBCASE("transform convolution matches the direct double sum") {
        const KernelSpec k = build_kernel(g, 2.362);
        for (int rep = 0; rep < 3; ++rep) {
            const CellField rho = random_field(g, rng);
            const CellField a = convolve(k, rho);
            const CellField b = convolve_direct(k, rho);
            const double scale = max_abs(b) + 1e-300;
            CHECK(max_diff(a, b) / scale <= 1e-12);
        }
    }

    SUBCASE("translation equivariance of the direct sum") {
        const KernelSpec k = build_kernel(g, 2.362);
        const CellField rho = random_field(g, rng);
        CellField shifted(g);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i) shifted((i + 1) % g.m, j) = rho(i, j);
        const CellField a = convolve_direct(k, rho);
        const CellField b = convolve_direct(k, shifted);
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.m; ++i)
                CHECK(b((i + 1) % g.m, j) == doctest::Approx(a(i, j)).epsilon(1e-13));
    }

    SUBCASE("even kernel is self-adjoint") {
        const KernelSpec k = build_kernel(g, 2.362);
        const CellField a = random_field(g, rng);
        const CellField b = random_field(g, rng);
        CHECK(rel_err(inner(a, convolve_direct(k, b)), inner(b, convolve_direct(k, a))) <= 1e-12);
    }
}

TEST_CASE("convolve: non-power-of-two grid goes through the direct transform") {
    const GridSpec g = make_grid(12, 12, 17.0 / 12);
    const KernelSpec k = build_kernel(g, 2.362);
    std::mt19937_64 rng(31);
    const CellField rho = random_field(g, rng);
    const CellField a = convolve(k, rho);
    const CellField b = convolve_direct(k, rho);
    CHECK(max_diff(a, b) / (max_abs(b) + 1e-300) <= 1e-12);
}
