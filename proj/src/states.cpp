#include "hsusy/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hsusy/eigensolver.hpp"
#include "hsusy/errors.hpp"

namespace hsusy {

namespace {

constexpr double kNormalizableBoundary = 1e-8;
constexpr double kEnergyCoincidence = 1e-12;
constexpr double kRefineOverlap = 0.999;

BandedOperator creation_operator(const SuperpotentialTable& table, std::size_t level) {
    return first_order_operator(table.diagonal(level), LadderSign::creation);
}

bool boundary_decays(const GridFunction& f) {
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, std::abs(v));
    if (!(peak > 0.0) || !std::isfinite(peak)) return false;
    return std::abs(f[0]) <= kNormalizableBoundary * peak &&
           std::abs(f[f.size() - 1]) <= kNormalizableBoundary * peak;
}

// Peak-scale (for non-normalizable functions) keeping the sign convention.
void peak_scale(GridFunction& f) {
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, std::abs(v));
    if (peak > 0.0 && std::isfinite(peak)) f *= 1.0 / peak;
    apply_sign_convention(f);
}

}  // namespace

std::string Provenance::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::oscillator:
            os << "oscillator n=" << n;
            break;
        case Kind::transformed:
            os << "transformed n=" << n << " level=" << level;
            break;
        case Kind::missing:
            os << "missing i=" << missing_index << " level=" << level;
            break;
    }
    return os.str();
}

EigenState oscillator_state(int n, const Grid& grid) {
    if (n < 0 || n > kMaxOscillatorIndex) {
        throw DomainError("oscillator_state: n must lie in [0, " + std::to_string(kMaxOscillatorIndex) + "]");
    }
    const std::size_t size = grid.size();
    std::vector<double> prev(size, 0.0), cur(size);
    const double c0 = std::pow(std::numbers::pi, -0.25);
    for (std::size_t i = 0; i < size; ++i) {
        const double x = grid.x(i);
        cur[i] = c0 * std::exp(-0.5 * x * x);
    }
    for (int k = 0; k < n; ++k) {
        const double a = std::sqrt(2.0 / (k + 1.0));
        const double b = std::sqrt(static_cast<double>(k) / (k + 1.0));
        for (std::size_t i = 0; i < size; ++i) {
            const double next = a * grid.x(i) * cur[i] - b * prev[i];
            prev[i] = cur[i];
            cur[i] = next;
        }
    }
    GridFunction psi(grid, std::move(cur));
    normalize_in_place(psi);
    return {n + 0.5, std::move(psi), {Provenance::Kind::oscillator, n, 0, 0}, true, 0.0};
}

EigenState missing_state(const SuperpotentialTable& table, std::size_t level) {
    const GridFunction& alpha = table.diagonal(level);
    const Grid& grid = table.grid();
    const std::size_t n = grid.size();
    const double h = grid.spacing();

    // log psi = -int alpha, trapezoid outward from the sample nearest 0.
    // The additive constant is irrelevant: psi is rescaled afterwards.
    std::vector<double> log_psi(n, 0.0);
    const std::size_t origin = grid.index_nearest_zero();
    for (std::size_t i = origin + 1; i < n; ++i) {
        log_psi[i] = log_psi[i - 1] - 0.5 * h * (alpha[i - 1] + alpha[i]);
    }
    for (std::size_t i = origin; i-- > 0;) {
        log_psi[i] = log_psi[i + 1] + 0.5 * h * (alpha[i + 1] + alpha[i]);
    }
    const double peak = *std::max_element(log_psi.begin(), log_psi.end());
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = std::exp(log_psi[i] - peak);
    GridFunction psi(grid, std::move(values));

    const bool normalizable = boundary_decays(psi);
    if (normalizable) {
        normalize_in_place(psi);
    } else {
        peak_scale(psi);
    }
    return {table.config().epsilon(level), std::move(psi),
            {Provenance::Kind::missing, -1, level, level}, normalizable, 0.0};
}

EigenState transformed_state(const SuperpotentialTable& table, int n, std::size_t level) {
    if (level > table.order()) {
        throw DomainError("transformed_state: level exceeds chain order");
    }
    EigenState state = oscillator_state(n, table.grid());
    double factor = 1.0;
    for (std::size_t j = 1; j <= level; ++j) {
        const double gap = state.energy - table.config().epsilon(j);
        if (gap <= kEnergyCoincidence) {
            throw DomainError("transformed_state: E_n coincides with factorization energy eps_" +
                              std::to_string(j) + "; the state is annihilated");
        }
        factor *= gap;
    }
    GridFunction psi = state.wavefunction;
    for (std::size_t j = 1; j <= level; ++j) psi = creation_operator(table, j).apply(psi);
    psi *= 1.0 / std::sqrt(factor);

    state.analytic_norm_deviation = std::abs(norm(psi) - 1.0);
    normalize_in_place(psi);
    state.wavefunction = std::move(psi);
    state.provenance = {Provenance::Kind::transformed, n, level, 0};
    return state;
}

EigenState intermediate_missing_state(const SuperpotentialTable& table, std::size_t j,
                                      std::size_t level) {
    if (j < 1 || j > level || level > table.order()) {
        throw DomainError("intermediate_missing_state: requires 1 <= j <= level <= m");
    }
    EigenState state = missing_state(table, j);
    if (j == level) return state;

    const double eps_j = table.config().epsilon(j);
    double factor = 1.0;
    for (std::size_t k = j + 1; k <= level; ++k) factor *= eps_j - table.config().epsilon(k);

    GridFunction psi = state.wavefunction;
    for (std::size_t k = j + 1; k <= level; ++k) psi = creation_operator(table, k).apply(psi);
    psi *= 1.0 / std::sqrt(factor);

    const bool seed_normalizable = state.normalizable;
    state.normalizable = seed_normalizable && boundary_decays(psi);
    if (state.normalizable) {
        state.analytic_norm_deviation = std::abs(norm(psi) - 1.0);
        normalize_in_place(psi);
    } else {
        peak_scale(psi);
    }
    state.wavefunction = std::move(psi);
    state.provenance.level = level;
    return state;
}

std::vector<EigenState> spectrum_assemble(const SuperpotentialTable& table, int n_max) {
    const std::size_t m = table.order();
    std::vector<EigenState> out;
    for (std::size_t j = 1; j <= m; ++j) {
        EigenState s = intermediate_missing_state(table, j, m);
        if (s.normalizable) out.push_back(std::move(s));
    }
    for (int n = 0; n <= n_max; ++n) {
        const double e = n + 0.5;
        bool annihilated = false;
        for (std::size_t j = 1; j <= m; ++j) {
            if (e - table.config().epsilon(j) <= kEnergyCoincidence) annihilated = true;
        }
        if (annihilated) continue;
        out.push_back(transformed_state(table, n, m));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const EigenState& a, const EigenState& b) { return a.energy < b.energy; });
    return out;
}

double eigen_residual(const BandedOperator& hamiltonian, const EigenState& state) {
    GridFunction r = hamiltonian.apply(state.wavefunction);
    r -= state.energy * state.wavefunction;
    return interior_norm(r);
}

std::vector<EigenState> refine_states(const std::vector<EigenState>& states,
                                      const BandedOperator& hamiltonian) {
    if (states.empty()) return {};
    const std::size_t k = std::min(states.size() + 2, hamiltonian.size());
    const EigenDecomposition eig = tridiagonal_eigensolve(hamiltonian, k);
    std::vector<EigenState> out = states;
    for (auto& s : out) {
        double best = 0.0;
        std::size_t at = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const double c = std::abs(inner_product(s.wavefunction, eig.eigenvectors[j]));
            if (c > best) {
                best = c;
                at = j;
            }
        }
        if (best < kRefineOverlap) {
            std::ostringstream os;
            os << "refine_states: " << s.provenance.describe() << " overlaps no eigenvector (best " << best
               << ")";
            throw OverlapError(os.str());
        }
        GridFunction v = eig.eigenvectors[at];
        if (inner_product(v, s.wavefunction) < 0.0) v *= -1.0;
        s.wavefunction = std::move(v);
    }
    return out;
}

}  // namespace hsusy
