// Acceptance run: one PASS/FAIL line per criterion. Criteria listed with
// --expect-fail are known to miss their bound; the exit code is zero only
// when the failing set matches that list exactly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hsusy/algebra.hpp"
#include "hsusy/eigensolver.hpp"
#include "hsusy/errors.hpp"
#include "hsusy/specfun.hpp"
#include "test_support.hpp"

using namespace hsusy;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Accumulates "label value/tol" pieces and the overall verdict.
class Ledger {
public:
    void bound(const std::string& label, double value, double tol) {
        const bool ok = value <= tol;
        pass_ = pass_ && ok;
        add(label + " " + num(value) + (ok ? " <= " : " > ") + num(tol));
    }
    void require(const std::string& label, bool ok) {
        pass_ = pass_ && ok;
        add(label + (ok ? " ok" : " FAILED"));
    }
    void note(const std::string& text) { add(text); }
    Outcome done() const { return {pass_, text_.str()}; }

private:
    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }
    void add(const std::string& s) { text_ << (first_ ? "" : "; ") << s, first_ = false; }

    bool pass_ = true;
    bool first_ = true;
    std::ostringstream text_;
};

const Grid kDefault = Grid::symmetric();
// 12001 points (h = 0.002): the 1e-4 spectral bound is below the default
// grid's O(h^2) eigenvalue error for n = 9 (about 5.7e-4).
const Grid kRefined = Grid::symmetric(12.0, 12001);
// 24001 points (h = 0.001) for the 1e-5 Riccati bound on every table entry.
const Grid kFine = Grid::symmetric(12.0, 24001);

struct Chain {
    SuperpotentialTable table;
    LadderOperatorSet set;
    std::vector<EigenState> spectrum;  // assembled
    std::vector<EigenState> basis;     // eigenvector-refined
};

Chain make_chain(const std::vector<Factorization>& entries, int n_max = 10) {
    SuperpotentialTable table = build_table(FactorizationConfig(entries), kDefault);
    LadderOperatorSet set = build_ladder_set(table);
    std::vector<EigenState> spectrum = spectrum_assemble(table, n_max);
    std::vector<EigenState> basis = refine_states(spectrum, set.h_tilde);
    return {std::move(table), std::move(set), std::move(spectrum), std::move(basis)};
}

std::string tag(const std::vector<Factorization>& entries) { return "m=" + std::to_string(entries.size()); }

std::vector<EigenState> transformed(const std::vector<EigenState>& states, int first, int last) {
    std::vector<EigenState> out;
    for (const auto& s : states) {
        if (s.provenance.kind == Provenance::Kind::transformed && s.provenance.n >= first &&
            s.provenance.n <= last) {
            out.push_back(s);
        }
    }
    return out;
}

double max_energy_error(const std::vector<double>& got, double offset, std::size_t count) {
    double worst = 0.0;
    for (std::size_t n = 0; n < count; ++n) worst = std::max(worst, std::abs(got[n] - (offset + n)));
    return worst;
}

Outcome oscillator_baseline() {
    Ledger l;
    const auto e = tridiagonal_eigensolve(build_hamiltonian(oscillator_potential(kRefined)), 10);
    l.bound("12001 pts max|E_n - (n+1/2)|, n<10", max_energy_error(e.eigenvalues, 0.5, 10), 1e-4);
    const auto d = tridiagonal_eigensolve(build_hamiltonian(oscillator_potential(kDefault)), 10);
    char buf[96];
    std::snprintf(buf, sizeof buf, "(2401 pts: %.3g)", max_energy_error(d.eigenvalues, 0.5, 10));
    l.note(buf);
    return l.done();
}

Outcome shifted_chain() {
    Ledger l;
    const GridFunction x = GridFunction::sample(kDefault, [](double v) { return v; });
    const GridFunction a = alpha1(-0.5, 0.0, kDefault);
    l.bound("max|alpha_1 - x|", interior_max_abs(a - x), 1e-8);
    const SuperpotentialTable t = build_table(FactorizationConfig({{-0.5, 0.0}}), kDefault);
    const GridFunction shifted = GridFunction::sample(kDefault, [](double v) { return 0.5 * v * v - 1.0; });
    l.bound("max|V~ - (x^2/2 - 1)|", interior_max_abs(partner_potential(t, 1).values - shifted), 1e-8);

    const SuperpotentialTable fine = build_table(FactorizationConfig({{-0.5, 0.0}}), kRefined);
    const auto e = tridiagonal_eigensolve(build_hamiltonian(partner_potential(fine, 1).values), 10);
    l.bound("12001 pts max|E_k - (k-1/2)|, k<10", max_energy_error(e.eigenvalues, -0.5, 10), 1e-4);
    return l.done();
}

Outcome closed_form_vs_oracle() {
    Ledger l;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> eps_dist(-3.0, 0.4);
    std::uniform_real_distribution<double> nu_dist(-0.9, 0.9);
    const GridFunction v = oscillator_potential(kDefault);
    double worst = 0.0;
    bool poles = false;
    for (int i = 0; i < 20; ++i) {
        const double eps = eps_dist(rng);
        const double nu = nu_dist(rng);
        const GridFunction a = alpha1(eps, nu, kDefault);
        const RiccatiOracleResult o = riccati_ode_oracle(v, eps, 2.0 * nu * specfun::gamma_ratio(eps));
        poles = poles || o.pole_encountered();
        worst = std::max(worst, interior_max_abs(a - o.alpha));
    }
    l.require("20 samples pole-free", !poles);
    l.bound("max interior |alpha1 - oracle|", worst, 1e-6);
    return l.done();
}

Outcome chain_recursion() {
    Ledger l;
    for (const auto& entries : testing::test_configs()) {
        const FactorizationConfig config(entries);
        const SuperpotentialTable t = build_table(config, kFine);
        double worst = 0.0;
        for (std::size_t i = 1; i <= t.order(); ++i) {
            const GridFunction v = partner_potential(t, i - 1).values;
            for (std::size_t k = i; k <= t.order(); ++k) {
                worst = std::max(worst, riccati_residual(t.entry(i, k), v, config.epsilon(k)));
            }
        }
        l.bound(tag(entries) + " 24001 pts max Riccati residual", worst, 1e-5);
    }
    return l.done();
}

Outcome spectrum_reproduction() {
    Ledger l;
    for (const auto& entries : {testing::config_m1(), testing::config_m2()}) {
        const Chain c = make_chain(entries);
        const auto oracle = tridiagonal_eigensolve(c.set.h_tilde, c.spectrum.size());
        double worst = 0.0;
        for (std::size_t k = 0; k < c.spectrum.size(); ++k) {
            worst = std::max(worst, std::abs(c.spectrum[k].energy - oracle.eigenvalues[k]));
        }
        l.bound(tag(entries) + " max|E - oracle|", worst, 1e-3);

        // one infinite ladder from 1/2 plus a singlet at every eps_i
        LadderStructure expected;
        for (auto it = entries.rbegin(); it != entries.rend(); ++it) expected.ladders.push_back({it->epsilon, 1});
        expected.ladders.push_back({0.5, std::nullopt});
        l.require(tag(entries) + " ladders", same_structure(spectrum_ladders(c.set, c.basis), expected));
    }
    return l.done();
}

Outcome polynomial_algebra() {
    Ledger l;
    for (const auto& entries : testing::test_configs()) {
        const Chain c = make_chain(entries);
        const std::vector<EigenState> lowest(c.basis.begin(), c.basis.begin() + 7);
        const AlgebraReport alg = verify_polynomial_algebra(c.set, lowest);
        const std::string t = tag(entries);
        l.bound(t + " [H,D]", alg.lowering.max_residual, 5e-3);
        l.bound(t + " [H,D^dag]", alg.raising.max_residual, 5e-3);
        l.bound(t + " [D,D^dag]", alg.commutator.max_residual, 5e-3);
        l.bound(t + " N(E)", verify_number_operator(c.set, transformed(c.basis, 1, 5)).max_residual, 1e-2);
        const AnnihilationReport ann = verify_annihilation(c.set, testing::of_kind(c.basis, true));
        l.bound(t + " D psi_eps", ann.by_d.max_residual, 1e-3);
        l.bound(t + " D^dag psi_eps", ann.by_d_dagger.max_residual, 1e-3);
    }
    return l.done();
}

Outcome linearized_action_check() {
    Ledger l;
    for (const auto& entries : testing::test_configs()) {
        const Chain c = make_chain(entries);
        const std::vector<EigenState> basis = transformed(c.basis, 0, 10);
        double worst = 0.0;
        bool landed = true;
        for (int n = 0; n <= 5; ++n) {
            for (LadderDirection dir : {LadderDirection::lower, LadderDirection::raise}) {
                const bool lower = dir == LadderDirection::lower;
                try {
                    const LinearizedAction a = linearized_action(c.set, basis, dir, n);
                    const double expected = lower ? std::sqrt(static_cast<double>(n)) : std::sqrt(n + 1.0);
                    worst = std::max(worst, std::abs(a.coefficient - expected));
                } catch (const OverlapError&) {
                    landed = false;
                }
            }
        }
        l.require(tag(entries) + " neighbours", landed);
        l.bound(tag(entries) + " max|c - sqrt(n)|", worst, 1e-2);
    }
    return l.done();
}

Outcome susy_block() {
    Ledger l;
    auto blocks_for = [](const Chain& c) {
        std::vector<BlockTestVector> blocks;
        for (int n = 0; n <= 3; ++n) {
            blocks.push_back({transformed(c.basis, n, n).at(0), oscillator_state(n, kDefault)});
        }
        return blocks;
    };
    for (const auto& entries : testing::test_configs()) {
        const Chain c = make_chain(entries);
        const SusyBlockReport r = verify_susy_block(c.set, blocks_for(c));
        l.bound(tag(entries) + " {Q_i,Q_j}", r.anticommutator.max_residual, 1e-3);
        l.bound(tag(entries) + " H_ss eigenvalue", r.eigenvalue.max_residual, 1e-2);
    }
    const Chain s = make_chain({{-0.5, 0.0}});
    double worst = 0.0;
    for (const auto& e : verify_susy_block(s.set, blocks_for(s)).eigenvalue.entries) {
        worst = std::max(worst, e.residual * (e.energy + 0.5));  // residual is relative to n + 1
    }
    l.bound("shifted <H_ss> - (n+1)", worst, 1e-3);
    return l.done();
}

Outcome admissibility_boundary() {
    Ledger l;
    int mismatches = 0;
    int samples = 0;
    for (int k = -15; k <= 15; ++k) {
        const double nu = 0.1 * k;
        const bool admissible = singularity_scan(FactorizationConfig({{0.0, nu}}), kDefault).admissible;
        if (admissible != (std::abs(k) < 10)) ++mismatches;
        ++samples;
    }
    l.require(std::to_string(samples) + " samples, " + std::to_string(mismatches) + " off |nu| < 1", mismatches == 0);
    return l.done();
}

Outcome ladder_classifier() {
    Ledger l;
    std::vector<std::vector<Factorization>> configs = {{}};
    for (const auto& c : testing::test_configs()) configs.push_back(c);
    configs.push_back({{-0.5, 0.0}});
    configs.push_back({{0.5, 0.0}});
    int agree = 0;
    for (const auto& entries : configs) {
        const Chain c = make_chain(entries);
        const RootSet roots = number_root_flags(c.set.config, c.basis);
        const LadderStructure predicted = analyze_ladder_structure(roots.roots, roots.normalizable);
        const LadderStructure measured = spectrum_ladders(c.set, c.basis);
        if (same_structure(predicted, measured)) {
            ++agree;
        } else {
            l.note(tag(entries) + " predicted " + predicted.describe() + " measured " + measured.describe());
        }
    }
    l.require(std::to_string(agree) + "/" + std::to_string(configs.size()) + " configurations agree",
              agree == static_cast<int>(configs.size()));
    return l.done();
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> expected_fail;
    app.add_option("--expect-fail", expected_fail, "criteria known to miss their bound")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    const std::set<int> expected(expected_fail.begin(), expected_fail.end());

    const std::vector<Criterion> criteria = {
        {1, "oscillator baseline", oscillator_baseline},
        {2, "shifted chain exactness", shifted_chain},
        {3, "closed form vs ODE oracle", closed_form_vs_oracle},
        {4, "chain recursion validity", chain_recursion},
        {5, "spectrum reproduction", spectrum_reproduction},
        {6, "polynomial Heisenberg algebra", polynomial_algebra},
        {7, "linearized action", linearized_action_check},
        {8, "SUSY block algebra", susy_block},
        {9, "admissibility boundary", admissibility_boundary},
        {10, "ladder classifier consistency", ladder_classifier},
    };

    int unexpected = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool known = expected.count(c.id) > 0;
        const char* note = "";
        if (!o.pass && known) note = " (expected)";
        if (o.pass && known) note = " (unexpected pass)";
        if (o.pass == known) ++unexpected;
        std::printf("%-4s %2d %s%s [%.1fs]: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, note, dt,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return unexpected == 0 ? 0 : 1;
}
