#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "hsusy/chain.hpp"
#include "hsusy/eigensolver.hpp"
#include "hsusy/errors.hpp"
#include "hsusy/specfun.hpp"
#include "test_support.hpp"

using namespace hsusy;

namespace {

// Riccati ODE integration to x = 1 with V = x^2/2, eps = 0, nu = 0.3
// (oracle independent of the closed form).
constexpr double kAlphaAtOne = 0.4623944019727593;

double interior_diff(const GridFunction& a, const GridFunction& b) { return interior_max_abs(a - b); }

// Third derivative of a level-1 superpotential from the Riccati equation:
// a' = 2(V - e) - a^2, a'' = 2x - 2 a a', a''' = 2 - 2 a'^2 - 2 a a''.
double max_third_derivative(const GridFunction& alpha, double eps) {
    const Grid& g = alpha.grid();
    double best = 0.0;
    for (std::size_t i = g.interior_first(); i <= g.interior_last(); ++i) {
        const double x = g.x(i);
        const double a = alpha[i];
        const double a1 = x * x - 2.0 * eps - a * a;
        const double a2 = 2.0 * x - 2.0 * a * a1;
        best = std::max(best, std::abs(2.0 - 2.0 * a1 * a1 - 2.0 * a * a2));
    }
    return best;
}

}  // namespace

TEST_CASE("factorization config validation") {
    CHECK_NOTHROW(FactorizationConfig({{0.0, 0.5}, {-1.0, 2.0}}));
    CHECK_NOTHROW(FactorizationConfig(std::vector<Factorization>{}));
    CHECK_THROWS_AS(FactorizationConfig({{0.6, 0.0}}), DomainError);
    CHECK_THROWS_AS(FactorizationConfig({{-1.0, 0.0}, {-0.5, 0.0}}), DomainError);
    CHECK_THROWS_AS(FactorizationConfig({{-1.0, 0.0}, {-1.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(FactorizationConfig({{std::nan(""), 0.0}}), DomainError);
}

TEST_CASE("alpha1 closed forms") {
    const Grid g = Grid::symmetric();
    const GridFunction x = GridFunction::sample(g, [](double v) { return v; });
    const GridFunction shifted = alpha1(-0.5, 0.0, g);
    const GridFunction reflected = alpha1(0.5, 0.9, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(shifted[i] - x[i]) < 1e-10);
        CHECK(std::abs(reflected[i] + x[i]) < 1e-10);
    }
}

TEST_CASE("alpha1 against the Riccati oracle value") {
    const Grid g(-1.0, 1.0, 3);
    const GridFunction a = alpha1(0.0, 0.3, g);
    CHECK(std::abs(a[2] - kAlphaAtOne) < 1e-7);
    // reflection: alpha(-x; nu) = -alpha(x; -nu)
    CHECK(std::abs(a[0] + alpha1(0.0, -0.3, g)[2]) < 1e-14);
}

TEST_CASE("alpha1 reports nodes") {
    const Grid g = Grid::symmetric();
    CHECK_THROWS_AS(alpha1(0.0, 1.5, g), SingularityError);
    CHECK_THROWS_AS(alpha1(0.0, -1.2, g), SingularityError);
    const SeedSamples seed = level1_seed(0.0, -1.2, g);
    REQUIRE(seed.sign_changes.size() == 1);
    CHECK(seed.sign_changes.front() > 0.0);
}

TEST_CASE("riccati residual") {
    const Grid g = Grid::symmetric();
    const GridFunction v = oscillator_potential(g);
    const GridFunction x = GridFunction::sample(g, [](double t) { return t; });
    CHECK(riccati_residual(x, v, -0.5) < 1e-12);
    CHECK(riccati_residual(-1.0 * x, v, 0.5) < 1e-12);

    // central-difference truncation bounds the residual of a smooth seed
    const GridFunction a = alpha1(0.0, 0.3, g);
    const double h = g.spacing();
    const double bound = h * h / 6.0 * max_third_derivative(a, 0.0);
    const double r = riccati_residual(a, v, 0.0);
    CHECK(r <= 1.05 * bound + 1e-12);
    CHECK(r >= 0.5 * bound);

    // h^2 convergence
    const Grid fine = Grid::symmetric(12.0, 4801);
    const double r_fine = riccati_residual(alpha1(0.0, 0.3, fine), oscillator_potential(fine), 0.0);
    CHECK(r / r_fine == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("random seeds satisfy the Riccati equation within truncation") {
    const Grid g = Grid::symmetric();
    const GridFunction v = oscillator_potential(g);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> eps_dist(-3.0, 0.4);
    std::uniform_real_distribution<double> nu_dist(-0.9, 0.9);
    const double h = g.spacing();
    for (int trial = 0; trial < 10; ++trial) {
        const double eps = eps_dist(rng);
        const double nu = nu_dist(rng);
        const GridFunction a = alpha1(eps, nu, g);
        CAPTURE(eps);
        CAPTURE(nu);
        CHECK(riccati_residual(a, v, eps) <= 1.05 * h * h / 6.0 * max_third_derivative(a, eps) + 1e-12);
        // no blow-up at the window edge
        CHECK(std::abs(a[0]) <= std::abs(g.x_min()) + 5.0);
        CHECK(std::abs(a[g.size() - 1]) <= std::abs(g.x_max()) + 5.0);
    }
}

TEST_CASE("chain step") {
    const Grid g = Grid::symmetric();
    const GridFunction a = alpha1(0.0, 0.5, g);
    CHECK_THROWS_AS(chain_step(a, a, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(chain_step(a, a, -1.0, -1.0 + 1e-13), DomainError);

    // nodeless seeds below a nodeless seed give a pole at level 2
    const GridFunction lower = alpha1(-1.0, 0.2, g);
    CHECK_THROWS_AS(chain_step(alpha1(0.0, 0.3, g), lower, 0.0, -1.0), SingularityError);
    try {
        (void)chain_step(alpha1(-0.5, 0.0, g), alpha1(-1.5, 0.0, g), -0.5, -1.5);
        FAIL("expected a singular chain");
    } catch (const SingularityError& e) {
        CHECK(std::abs(e.x()) < 1.0);
    }
}

TEST_CASE("singularity scan") {
    const Grid g = Grid::symmetric();
    CHECK(singularity_scan(FactorizationConfig({{0.0, 0.5}}), g).admissible);
    const AdmissibilityReport neg = singularity_scan(FactorizationConfig({{0.0, -1.2}}), g);
    CHECK_FALSE(neg.admissible);
    REQUIRE(neg.first_singularity().has_value());
    CHECK(neg.first_singularity()->first == 1);
    const AdmissibilityReport trivial = singularity_scan(FactorizationConfig({{-0.5, 0.0}}), g);
    CHECK(trivial.admissible);
    CHECK(trivial.levels.at(0).sign_changes.empty());

    CHECK_FALSE(singularity_scan(FactorizationConfig({{-0.5, 0.0}, {-1.5, 0.0}}), g).admissible);
    const AdmissibilityReport pair = singularity_scan(FactorizationConfig({{0.0, 0.3}, {-1.0, 0.2}}), g);
    CHECK_FALSE(pair.admissible);
    CHECK(pair.first_singularity()->first == 2);

    for (const auto& entries : testing::test_configs()) {
        CHECK(singularity_scan(FactorizationConfig(entries), g).admissible);
    }
    // exactly at |nu| = 1 the growing parts cancel
    CHECK_FALSE(singularity_scan(FactorizationConfig({{0.0, 1.0}}), g).admissible);
    CHECK(singularity_scan(FactorizationConfig({{0.0, 0.9}}), g).admissible);
}

TEST_CASE("build table") {
    const Grid g = Grid::symmetric();
    const SuperpotentialTable single = build_table(FactorizationConfig({{-0.5, 0.0}}), g);
    CHECK(single.order() == 1);
    CHECK(interior_diff(single.diagonal(1), GridFunction::sample(g, [](double v) { return v; })) < 1e-10);
    CHECK_THROWS_AS(build_table(FactorizationConfig({{0.0, 1.5}}), g), SingularityError);
    try {
        (void)build_table(FactorizationConfig({{-0.5, 0.0}, {-1.5, 0.0}}), g);
        FAIL("expected a singular chain");
    } catch (const SingularityError& e) {
        CHECK(e.level() == 2);
        CHECK(e.energy_index() == 2);
    }

    const SuperpotentialTable empty = build_table(FactorizationConfig(), g);
    CHECK(empty.order() == 0);
}

TEST_CASE("table entries satisfy their level Riccati equation") {
    const Grid g = Grid::symmetric();
    for (const auto& entries : testing::test_configs()) {
        const FactorizationConfig config(entries);
        const SuperpotentialTable table = build_table(config, g);
        for (std::size_t i = 1; i <= table.order(); ++i) {
            CHECK(table.entry(i, i).regular());
            const GridFunction v_prev = partner_potential(table, i - 1).values;
            for (std::size_t k = i; k <= table.order(); ++k) {
                CAPTURE(i);
                CAPTURE(k);
                // default grid: h^2 truncation dominates, roughly 1e-4 at h = 0.01
                CHECK(riccati_residual(table.entry(i, k), v_prev, config.epsilon(k)) < 2e-3);
            }
        }
    }
}

TEST_CASE("partner potentials") {
    const Grid g = Grid::symmetric();
    const GridFunction v = oscillator_potential(g);
    const PartnerPotential down = partner_potential(build_table(FactorizationConfig({{-0.5, 0.0}}), g), 1);
    CHECK(interior_diff(down.values, v - GridFunction::sample(g, [](double) { return 1.0; })) < 1e-8);
    CHECK(down.provenance.size() == 1);

    const PartnerPotential up = partner_potential(build_table(FactorizationConfig({{0.5, 0.3}}), g), 1);
    CHECK(interior_diff(up.values, v + GridFunction::sample(g, [](double) { return 1.0; })) < 1e-8);

    const PartnerPotential zero = partner_potential(build_table(FactorizationConfig({{0.0, 0.5}}), g), 0);
    CHECK(interior_diff(zero.values, v) == 0.0);

    const PartnerPotential p = partner_potential(build_table(FactorizationConfig({{0.0, 0.5}}), g), 1);
    const EigenDecomposition e = tridiagonal_eigensolve(build_hamiltonian(p.values), 5);
    const double want[] = {0.0, 0.5, 1.5, 2.5, 3.5};
    for (int k = 0; k < 5; ++k) CHECK(std::abs(e.eigenvalues[k] - want[k]) < 1e-3);
}

TEST_CASE("Riccati ODE oracle") {
    const Grid g = Grid::symmetric();
    const GridFunction v = oscillator_potential(g);
    const RiccatiOracleResult exact = riccati_ode_oracle(v, -0.5, 0.0);
    CHECK_FALSE(exact.pole_encountered());
    CHECK(interior_diff(exact.alpha, GridFunction::sample(g, [](double t) { return t; })) < 1e-9);

    const double r0 = specfun::gamma_ratio(0.0);
    const RiccatiOracleResult seeded = riccati_ode_oracle(v, 0.0, 2.0 * 0.3 * r0);
    CHECK_FALSE(seeded.pole_encountered());
    CHECK(interior_diff(seeded.alpha, alpha1(0.0, 0.3, g)) < 1e-7);
    CHECK(std::abs(seeded.alpha[g.index_nearest_zero() + 100] - kAlphaAtOne) < 1e-7);

    const RiccatiOracleResult pole = riccati_ode_oracle(v, 0.0, 2.0 * 1.5 * r0);
    CHECK(pole.pole_encountered());
    REQUIRE(pole.pole_left.has_value());
    CHECK(*pole.pole_left < 0.0);
    CHECK(std::count(pole.valid.begin(), pole.valid.end(), false) > 0);
    CHECK(std::isnan(pole.alpha[0]));
}
