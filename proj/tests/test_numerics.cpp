#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "hsusy/banded_operator.hpp"
#include "hsusy/eigensolver.hpp"
#include "hsusy/errors.hpp"
#include "hsusy/states.hpp"

using namespace hsusy;

namespace {

GridFunction on(const Grid& g, double (*f)(double)) { return GridFunction::sample(g, f); }

double interior_max_diff(const GridFunction& a, const GridFunction& b) { return interior_max_abs(a - b); }

GridFunction oscillator_v(const Grid& g) {
    return GridFunction::sample(g, [](double x) { return 0.5 * x * x; });
}

// Smooth bump supported on |x - c| < w.
GridFunction bump(const Grid& g, double c, double w, double k) {
    return GridFunction::sample(g, [=](double x) {
        const double t = (x - c) / w;
        return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) * std::cos(k * x) : 0.0;
    });
}

}  // namespace

TEST_CASE("grid basics") {
    const Grid g = Grid::symmetric();
    CHECK(g.size() == 2401);
    CHECK(g.spacing() == doctest::Approx(0.01));
    CHECK(g.is_symmetric());
    CHECK(std::abs(g.x(g.index_nearest_zero())) < 1e-12);
    CHECK(std::abs(g.x(g.interior_first())) <= 0.8 * 12.0 + 1e-12);
    CHECK(std::abs(g.x(g.interior_last())) <= 0.8 * 12.0 + 1e-12);
    CHECK_THROWS_AS(Grid(1.0, -1.0, 10), DomainError);
    CHECK_THROWS_AS(Grid(-1.0, 1.0, 2), DomainError);
    CHECK_THROWS_AS(GridFunction(g, std::vector<double>(5)), GridMismatchError);
}

TEST_CASE("inner product") {
    const Grid g = Grid::symmetric();
    const GridFunction psi0 = oscillator_state(0, g).wavefunction;
    const GridFunction psi1 = oscillator_state(1, g).wavefunction;
    CHECK(std::abs(inner_product(psi0, psi0) - 1.0) < 1e-10);
    CHECK(std::abs(inner_product(psi0, psi1)) < 1e-10);
    const GridFunction gauss = on(g, [](double x) { return std::exp(-0.5 * x * x); });
    CHECK(std::abs(inner_product(gauss, gauss) - std::sqrt(std::numbers::pi)) < 1e-10);
    CHECK_THROWS_AS(inner_product(psi0, GridFunction(Grid::symmetric(12.0, 101))), GridMismatchError);
}

TEST_CASE("derivative stencils") {
    const Grid g = Grid::symmetric();
    const BandedOperator d1 = derivative_matrix(g, 1);
    const BandedOperator d2 = derivative_matrix(g, 2);
    const GridFunction x = on(g, [](double v) { return v; });
    const GridFunction x2 = on(g, [](double v) { return v * v; });
    const GridFunction one = on(g, [](double) { return 1.0; });
    const GridFunction two = on(g, [](double) { return 2.0; });
    CHECK(interior_max_diff(d1.apply(x), one) < 1e-12);
    CHECK(interior_max_diff(d2.apply(x2), two) < 1e-9);

    const GridFunction s = on(g, [](double v) { return std::sin(v); });
    const GridFunction c = on(g, [](double v) { return std::cos(v); });
    CHECK(interior_max_diff(d1.apply(s), c) < 2e-5);

    // boundary rows stay first-order accurate on a linear function
    const GridFunction dx = d1.apply(x);
    CHECK(std::abs(dx[0] - 1.0) < 1e-12);
    CHECK(std::abs(dx[g.size() - 1] - 1.0) < 1e-12);
    CHECK_THROWS_AS(derivative_matrix(g, 3), DomainError);
}

TEST_CASE("compose") {
    const Grid g = Grid::symmetric();
    const BandedOperator id = BandedOperator::identity(g);
    const std::array<BandedOperator, 1> only{id};
    const BandedOperator c = compose(only);
    const GridFunction f = on(g, [](double v) { return std::sin(v) * std::exp(-0.1 * v * v); });
    CHECK(interior_max_diff(c.apply(f), f) == 0.0);

    const BandedOperator d1 = derivative_matrix(g, 1);
    const std::array<BandedOperator, 2> twice{d1, d1};
    const BandedOperator dd = compose(twice);
    CHECK(dd.bandwidth() == 2);
    const GridFunction s = on(g, [](double v) { return std::sin(v); });
    // D1 D1 is the wide second difference: error h^2/3 |f''''|
    CHECK(interior_max_diff(dd.apply(s), derivative_matrix(g, 2).apply(s)) < 4e-5);

    // number operator a^dag a psi_n = n psi_n
    const GridFunction x = on(g, [](double v) { return v; });
    const std::array<BandedOperator, 2> number{first_order_operator(x, LadderSign::creation),
                                               first_order_operator(x, LadderSign::annihilation)};
    const BandedOperator n_op = compose(number);
    for (int n = 0; n <= 5; ++n) {
        const GridFunction psi = oscillator_state(n, g).wavefunction;
        CHECK(interior_norm(n_op.apply(psi) - n * psi) < 1e-4 * (1 + n * n));
    }
}

TEST_CASE("bandwidth of products adds") {
    const Grid g = Grid::symmetric(3.0, 31);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int trial = 0; trial < 20; ++trial) {
        const int ka = pick(rng);
        const int kb = pick(rng);
        BandedOperator a(g, ka);
        BandedOperator b(g, kb);
        for (std::size_t i = 0; i < g.size(); ++i) {
            a.ref(i, i) = 1.0 + i;
            b.ref(i, i) = 2.0;
        }
        CHECK((a * b).bandwidth() == static_cast<std::size_t>(ka + kb));
    }
}

TEST_CASE("first-order operators") {
    const Grid g = Grid::symmetric();
    const GridFunction x = on(g, [](double v) { return v; });
    const GridFunction psi0 = oscillator_state(0, g).wavefunction;
    const GridFunction psi1 = oscillator_state(1, g).wavefunction;
    CHECK(interior_max_abs(first_order_operator(x, LadderSign::annihilation).apply(psi0)) < 5e-5);
    // grid states start positive on the left, so a^dag psi_0 = -psi_1 here
    CHECK(interior_max_diff(first_order_operator(x, LadderSign::creation).apply(psi0), -1.0 * psi1) < 5e-5);

    const GridFunction zero(g);
    const GridFunction s = on(g, [](double v) { return std::sin(v); });
    const GridFunction ds = derivative_matrix(g, 1).apply(s);
    CHECK(interior_max_diff(first_order_operator(zero, LadderSign::annihilation).apply(s),
                            (1.0 / std::sqrt(2.0)) * ds) < 1e-13);
    CHECK(interior_max_diff(first_order_operator(zero, LadderSign::creation).apply(s),
                            (-1.0 / std::sqrt(2.0)) * ds) < 1e-13);

    GridFunction bad = x;
    bad[3] = std::nan("");
    CHECK_THROWS_AS(first_order_operator(bad, LadderSign::creation), NonFiniteError);
}

TEST_CASE("adjointness of A and A^dag for random superpotentials") {
    const Grid g = Grid::symmetric();
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> centre(-6.0, 6.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng);
        const GridFunction alpha =
            GridFunction::sample(g, [=](double v) { return c0 + c1 * v + c2 * std::sin(v); });
        const GridFunction f = bump(g, centre(rng), 2.0, coef(rng));
        const GridFunction h = bump(g, centre(rng), 2.5, coef(rng));
        const double lhs = inner_product(first_order_operator(alpha, LadderSign::creation).apply(f), h);
        const double rhs = inner_product(f, first_order_operator(alpha, LadderSign::annihilation).apply(h));
        CHECK(std::abs(lhs - rhs) < 1e-8);
    }
}

TEST_CASE("Hamiltonian") {
    const Grid g = Grid::symmetric();
    const BandedOperator h = build_hamiltonian(oscillator_v(g));
    CHECK(h.bandwidth() == 1);
    CHECK(h.is_symmetric());
    for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(h.at(i, i + 1) == h.at(i + 1, i));

    GridFunction bad = oscillator_v(g);
    bad[100] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(build_hamiltonian(bad), NonFiniteError);
}

TEST_CASE("eigensolver small cases") {
    const Grid g(0.0, 1.0, 3);
    BandedOperator m(g, 1);
    // [[2,1,0],[1,2,0],[0,0,5]]
    m.ref(0, 0) = 2.0;
    m.ref(0, 1) = 1.0;
    m.ref(1, 0) = 1.0;
    m.ref(1, 1) = 2.0;
    m.ref(2, 2) = 5.0;
    const EigenDecomposition e = tridiagonal_eigensolve(m, 3);
    CHECK(e.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(e.eigenvalues[2] == doctest::Approx(5.0).epsilon(1e-14));

    BandedOperator d(Grid(0.0, 1.0, 6), 1);
    const double diag[] = {4.0, -1.0, 3.0, 0.5, 2.0, -7.0};
    for (std::size_t i = 0; i < 6; ++i) d.ref(i, i) = diag[i];
    const EigenDecomposition ed = tridiagonal_eigensolve(d, 6);
    const double sorted[] = {-7.0, -1.0, 0.5, 2.0, 3.0, 4.0};
    for (std::size_t i = 0; i < 6; ++i) CHECK(ed.eigenvalues[i] == doctest::Approx(sorted[i]).epsilon(1e-14));

    BandedOperator wide(Grid(0.0, 1.0, 6), 2);
    CHECK_THROWS_AS(tridiagonal_eigensolve(d, 0), DomainError);
    wide.ref(0, 2) = 1.0;
    wide.ref(2, 0) = 1.0;
    CHECK_THROWS_AS(tridiagonal_eigensolve(wide, 2), DomainError);
}

TEST_CASE("oscillator spectrum on the default grid") {
    const Grid g = Grid::symmetric();
    const double h = g.spacing();
    const EigenDecomposition e = tridiagonal_eigensolve(build_hamiltonian(oscillator_v(g)), 10);
    CHECK(std::abs(e.eigenvalues[0] - 0.5) < 1e-5);
    for (int n = 0; n < 10; ++n) {
        // leading stencil error: -h^2/24 <p^4>, <p^4> = 3/4 (2n^2 + 2n + 1)
        const double predicted = n + 0.5 - h * h / 24.0 * 0.75 * (2.0 * n * n + 2.0 * n + 1.0);
        CAPTURE(n);
        CHECK(std::abs(e.eigenvalues[n] - predicted) < 1e-6);
    }
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = 0; j < 10; ++j) {
            const double want = i == j ? 1.0 : 0.0;
            CHECK(std::abs(inner_product(e.eigenvectors[i], e.eigenvectors[j]) - want) < 1e-10);
        }
    }
}

TEST_CASE("oscillator spectrum on a refined grid") {
    const Grid g = Grid::symmetric(12.0, 12001);
    const EigenDecomposition e = tridiagonal_eigensolve(build_hamiltonian(oscillator_v(g)), 10);
    for (int n = 0; n < 10; ++n) CHECK(std::abs(e.eigenvalues[n] - (n + 0.5)) < 1e-4);
}

TEST_CASE("eigen-residuals") {
    const Grid g = Grid::symmetric();
    const BandedOperator h = build_hamiltonian(oscillator_v(g));
    double hnorm = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        hnorm = std::max(hnorm, std::abs(h.at(i, i)) + std::abs(h.at(i, i + 1)) + (i ? std::abs(h.at(i, i - 1)) : 0.0));
    }
    const EigenDecomposition e = tridiagonal_eigensolve(h, 6);
    for (std::size_t k = 0; k < 6; ++k) {
        const GridFunction r = h.apply(e.eigenvectors[k]) - e.eigenvalues[k] * e.eigenvectors[k];
        CHECK(norm(r) <= 1e-9 * hnorm);
    }
}

TEST_CASE("shifted oscillator and free box") {
    const Grid g = Grid::symmetric();
    const GridFunction shifted = GridFunction::sample(g, [](double x) { return 0.5 * x * x - 1.0; });
    CHECK(std::abs(tridiagonal_eigensolve(build_hamiltonian(shifted), 1).eigenvalues[0] + 0.5) < 1e-5);

    // V = 0 with walls one spacing outside the grid: discrete sine modes
    const GridFunction zero(g);
    const EigenDecomposition box = tridiagonal_eigensolve(build_hamiltonian(zero), 3);
    const double h = g.spacing();
    const double n1 = static_cast<double>(g.size() + 1);
    for (int k = 1; k <= 3; ++k) {
        const double want = (1.0 - std::cos(k * std::numbers::pi / n1)) / (h * h);
        CHECK(std::abs(box.eigenvalues[k - 1] - want) < 1e-10 * want);
    }
}

TEST_CASE("sign convention and normalization") {
    const Grid g = Grid::symmetric();
    GridFunction f = GridFunction::sample(g, [](double x) { return -3.0 * std::exp(-x * x); });
    const double before = normalize_in_place(f);
    CHECK(before > 0.0);
    CHECK(std::abs(norm(f) - 1.0) < 1e-12);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(f[i]) > 1e-6) {
            CHECK(f[i] > 0.0);
            break;
        }
    }
    CHECK(count_interior_sign_changes(oscillator_state(5, g).wavefunction) == 5);
}
