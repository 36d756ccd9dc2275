#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hsusy/banded_operator.hpp"
#include "hsusy/chain.hpp"
#include "hsusy/grid.hpp"

namespace hsusy {

struct Provenance {
    enum class Kind { oscillator, transformed, missing };
    Kind kind = Kind::oscillator;
    int n = -1;             // oscillator index (oscillator / transformed)
    std::size_t level = 0;  // chain level the state lives at
    std::size_t missing_index = 0;  // i of eps_i (missing)

    std::string describe() const;
};

struct EigenState {
    double energy = 0.0;
    GridFunction wavefunction;
    Provenance provenance;
    bool normalizable = true;
    // |grid norm - 1| of the state as produced by the analytic normalization
    // factors, before grid renormalization. Zero where not applicable.
    double analytic_norm_deviation = 0.0;
};

inline constexpr int kMaxOscillatorIndex = 60;

/// Hermite function psi_n by the stable two-term recurrence, renormalized
/// on the grid; energy n + 1/2.
EigenState oscillator_state(int n, const Grid& grid);

/// State annihilated by A_i at level i: exp(-int_0^x alpha_i(y, eps_i) dy).
/// Flagged non-normalizable (and left peak-scaled) when a boundary sample
/// exceeds 1e-8 of the peak.
EigenState missing_state(const SuperpotentialTable& table, std::size_t level);

/// A_i^dag ... A_1^dag psi_n / sqrt(prod (E_n - eps_j)), renormalized.
/// Throws DomainError when E_n coincides with a factorization energy.
EigenState transformed_state(const SuperpotentialTable& table, int n, std::size_t level);

/// Level-j missing state propagated to level i with A_i^dag ... A_{j+1}^dag.
EigenState intermediate_missing_state(const SuperpotentialTable& table, std::size_t j,
                                      std::size_t level);

/// Normalizable missing states plus transformed states n = 0..n_max at the
/// top level, sorted by energy.
std::vector<EigenState> spectrum_assemble(const SuperpotentialTable& table, int n_max);

/// Replaces each state by the eigenvector of `hamiltonian` it overlaps most,
/// sign-aligned with the original; energies and provenance are kept.
/// The discrete eigenvectors carry round-off noise at machine level, whereas
/// states built through B^dag carry it amplified by the stencils, which high
/// order ladder operators then blow up. OverlapError below overlap 0.999.
std::vector<EigenState> refine_states(const std::vector<EigenState>& states,
                                      const BandedOperator& hamiltonian);

/// Interior L2 norm of H psi - E psi.
double eigen_residual(const BandedOperator& hamiltonian, const EigenState& state);

}  // namespace hsusy
