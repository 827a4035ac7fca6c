#include <cmath>

#include "doctest.h"
#include "hf/energy.hpp"
#include "test_util.hpp"

using namespace hf;
using test::random_field;
using test::rel_err;

namespace {

std::shared_ptr<const KernelSpec> freeze_kernel(int size) {
    const GridSpec g = make_grid(size, size, 17.0 / size);
    return std::make_shared<KernelSpec>(build_kernel(g, 2.362));
}

}  // namespace

TEST_CASE("cdft energy: uniform fields") {
    auto kernel = freeze_kernel(16);
    const GridSpec& g = kernel->grid;
    const CdftEnergy en(kernel);
    const double area = g.lx() * g.ly();

    SUBCASE("uniform rho = 1: ideal part is -|Omega|") {
        CellField one(g, 1.0);
        const auto comps = en.components(one);
        CHECK(comps[0].first == "ideal");
        CHECK(comps[0].second == doctest::Approx(-area).epsilon(1e-13));
    }

    SUBCASE("uniform rho = c total") {
        const double c = 0.8;
        CellField f(g, c);
        const double expected = area * c * (std::log(c) - 1.0)
                                - 0.5 * area * c * c * kernel->j_mass;
        CHECK(en.F(f) == doctest::Approx(expected).epsilon(1e-12));
    }

    SUBCASE("uniform gradients") {
        const double c = 1.3;
        CellField f(g, c);
        const CellField gc = en.grad_Fc(f);
        const CellField ge = en.grad_Fe(f);
        const double exp_c = std::log(c) + 2.0 * kernel->je_mass * c;
        const double exp_e = 2.0 * kernel->je_mass * c + c * kernel->j_mass;
        for (std::size_t q = 0; q < gc.size(); ++q) {
            CHECK(gc.data()[q] == doctest::Approx(exp_c).epsilon(1e-12));
            CHECK(ge.data()[q] == doctest::Approx(exp_e).epsilon(1e-12));
        }
    }

    SUBCASE("nonpositive density is a domain error naming the cell") {
        CellField f(g, 1.0);
        f(3, 5) = -0.25;
        CHECK_THROWS_WITH_AS((void)en.F(f), doctest::Contains("(3,5)"), std::domain_error);
    }
}

TEST_CASE("cdft energy: splitting identity on random positive fields") {
    auto kernel = freeze_kernel(8);
    const CdftEnergy en(kernel);
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 5; ++rep) {
        const CellField rho = random_field(kernel->grid, rng, 0.4, 2.0);
        CHECK(rel_err(en.F(rho), en.Fc(rho) - en.Fe(rho)) <= 1e-12);
    }
}

TEST_CASE("pfc energy: uniform fields and sign structure") {
    const GridSpec g = make_grid(8, 8, 0.5);
    const PfcEnergy en = PfcEnergy::from_epsilon(0.025);
    const double area = g.lx() * g.ly();

    SUBCASE("rho = 3/2 zeroes every term") {
        CellField f(g, 1.5);
        CHECK(en.F(f) == doctest::Approx(0.0).scale(1.0));
    }

    SUBCASE("uniform rho = c") {
        const double c = 0.9, d = c - 1.5;
        CellField f(g, c);
        const double expected = area * (d * d * d * d / 12.0 + en.alpha() / 2.0 * d * d);
        CHECK(en.F(f) == doctest::Approx(expected).epsilon(1e-13));
        const CellField gc = en.grad_Fc(f);
        const CellField ge = en.grad_Fe(f);
        for (std::size_t q = 0; q < gc.size(); ++q) {
            CHECK(gc.data()[q] == doctest::Approx(d * d * d / 3.0 + en.alpha() * d).epsilon(1e-13));
            CHECK(ge.data()[q] == doctest::Approx(0.0).scale(1.0));
        }
    }

    SUBCASE("(rho || lap rho) is nonpositive") {
        std::mt19937_64 rng(43);
        for (int rep = 0; rep < 10; ++rep) {
            const CellField rho = random_field(g, rng);
            CHECK(inner(rho, laplacian_h(rho)) <= 1e-12);
        }
    }

    SUBCASE("splitting identity") {
        std::mt19937_64 rng(47);
        const CellField rho = random_field(g, rng, -0.5, 1.5);
        CHECK(rel_err(en.F(rho), en.Fc(rho) - en.Fe(rho)) <= 1e-12);
    }
}

TEST_CASE("proper splitting inequality on sampled pairs") {
    std::mt19937_64 rng(53);

    SUBCASE("cdft") {
        auto kernel = freeze_kernel(8);
        const CdftEnergy en(kernel);
        for (int rep = 0; rep < 50; ++rep) {
            const CellField phi = random_field(kernel->grid, rng, 0.5, 2.0);
            const CellField psi = random_field(kernel->grid, rng, 0.5, 2.0);
            CellField dmu = en.grad_Fc(phi);
            const CellField ge = en.grad_Fe(psi);
            CellField drho = phi;
            for (std::size_t q = 0; q < dmu.size(); ++q) {
                dmu.data()[q] -= ge.data()[q];
                drho.data()[q] -= psi.data()[q];
            }
            const double lhs = en.F(phi) - en.F(psi);
            const double rhs = inner(dmu, drho);
            const double scale = 1.0 + std::abs(en.F(phi)) + std::abs(en.F(psi));
            CHECK(lhs <= rhs + 1e-12 * scale);
        }
    }

    SUBCASE("pfc") {
        const GridSpec g = make_grid(8, 8, 0.5);
        const PfcEnergy en = PfcEnergy::from_epsilon(0.025);
        for (int rep = 0; rep < 50; ++rep) {
            const CellField phi = random_field(g, rng, -0.5, 1.5);
            const CellField psi = random_field(g, rng, -0.5, 1.5);
            CellField dmu = en.grad_Fc(phi);
            const CellField ge = en.grad_Fe(psi);
            CellField drho = phi;
            for (std::size_t q = 0; q < dmu.size(); ++q) {
                dmu.data()[q] -= ge.data()[q];
                drho.data()[q] -= psi.data()[q];
            }
            const double lhs = en.F(phi) - en.F(psi);
            const double rhs = inner(dmu, drho);
            const double scale = 1.0 + std::abs(en.F(phi)) + std::abs(en.F(psi));
            CHECK(lhs <= rhs + 1e-12 * scale);
        }
    }
}

TEST_CASE("gradients match central differences of the functionals") {
    std::mt19937_64 rng(59);
    auto check_pair = [&](const ConvexSplitEnergy& en, const CellField& rho,
                          const CellField& v) {
        for (bool convex : {true, false}) {
            const CellField grad = convex ? en.grad_Fc(rho) : en.grad_Fe(rho);
            const double directional = inner(grad, v);
            double best = 1e300;
            for (double eps : {1e-3, 1e-4, 1e-5}) {
                CellField p = rho, m = rho;
                for (std::size_t q = 0; q < rho.size(); ++q) {
                    p.data()[q] += eps * v.data()[q];
                    m.data()[q] -= eps * v.data()[q];
                }
                const double fd = convex ? (en.Fc(p) - en.Fc(m)) / (2 * eps)
                                         : (en.Fe(p) - en.Fe(m)) / (2 * eps);
                best = std::min(best, rel_err(fd, directional));
            }
            CHECK(best <= 1e-6);
        }
    };

    auto kernel = freeze_kernel(8);
    check_pair(CdftEnergy(kernel), random_field(kernel->grid, rng, 0.5, 2.0),
               random_field(kernel->grid, rng, -1.0, 1.0));
    const GridSpec g = make_grid(8, 8, 0.5);
    check_pair(PfcEnergy::from_epsilon(0.025), random_field(g, rng, -0.5, 1.5),
               random_field(g, rng, -1.0, 1.0));
}

TEST_CASE("total_energy report") {
    const GridSpec g = make_grid(8, 8, 0.5);
    const PfcEnergy en = PfcEnergy::from_epsilon(0.025);

    SUBCASE("zero velocity: total equals F") {
        std::mt19937_64 rng(61);
        const CellField rho = random_field(g, rng, 0.2, 1.2);
        VelocityField w(g);
        const EnergyReport rep = total_energy(rho, w, en);
        CHECK(rep.kinetic == 0.0);
        CHECK(rep.total == doctest::Approx(en.F(rho)).epsilon(1e-12));
        CHECK(rep.mass == doctest::Approx(field_mass(rho)).epsilon(1e-14));
    }

    SUBCASE("uniform kinetic energy") {
        const double c = 0.7, a = 0.3;
        CellField rho(g, c);
        VelocityField w(g);
        w.u = CellField(g, a);
        const EnergyReport rep = total_energy(rho, w, en);
        CHECK(rep.kinetic == doctest::Approx(0.5 * c * a * a * g.lx() * g.ly()).epsilon(1e-13));
        CHECK(rep.total == doctest::Approx(rep.kinetic + rep.free).epsilon(1e-13));
    }
}
