#pragma once

// Natural ladder operators D = B^dag a B, D^dag = B^dag a^dag B of the
// oscillator's higher-order SUSY partners and the checks that they close a
// polynomial Heisenberg algebra. All commutators are evaluated as actions on
// states and measured on the interior window.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hsusy/banded_operator.hpp"
#include "hsusy/chain.hpp"
#include "hsusy/states.hpp"

namespace hsusy {

// Product of banded factors kept unexpanded; factors.back() acts first.
struct OperatorChain {
    std::vector<BandedOperator> factors;

    GridFunction apply(const GridFunction& f) const;
    BandedOperator expand(const Grid& grid) const;
};

struct LadderOperatorSet {
    BandedOperator b_dagger;  // A_m^dag ... A_1^dag
    BandedOperator b;         // A_1 ... A_m
    BandedOperator a;
    BandedOperator a_dagger;
    BandedOperator d;
    BandedOperator d_dagger;
    BandedOperator h_tilde;   // Hamiltonian of the top-level partner
    BandedOperator h0;        // oscillator Hamiltonian
    FactorizationConfig config;
    // Same operators as factor chains; every state-level check uses these.
    OperatorChain b_dagger_chain;
    OperatorChain b_chain;
    OperatorChain d_chain;
    OperatorChain d_dagger_chain;
};

LadderOperatorSet build_ladder_set(const SuperpotentialTable& table);

/// Largest elementwise |D^dag - D^T| over rows in the interior window,
/// relative to the largest |D| entry there (entries grow like h^-(2m+1)).
double transpose_defect(const LadderOperatorSet& set);

// N(E) = (E - 1/2) prod_i (E - eps_i - 1)(E - eps_i), kept in factored form.
class NumberPolynomial {
public:
    explicit NumberPolynomial(const FactorizationConfig& config);

    const std::vector<double>& roots() const { return roots_; }  // ascending
    std::size_t degree() const { return roots_.size(); }
    double operator()(double energy) const;

private:
    std::vector<double> roots_;
};

double number_eval(const NumberPolynomial& poly, double energy);

struct StateResidual {
    std::string state;
    double energy;
    double residual;
};

struct ResidualReport {
    std::string name;
    double max_residual = 0.0;
    std::vector<StateResidual> entries;

    void add(const EigenState& state, double residual);
};

/// max over test states (eigenstates of H0) of
/// ||(H~ B^dag - B^dag H0) psi|| / ||B^dag psi||.
ResidualReport verify_intertwining(const LadderOperatorSet& set,
                                   const std::vector<EigenState>& test_states);

struct AlgebraReport {
    ResidualReport lowering;    // ||([H~, D] + D) psi|| / (1 + ||D psi||)
    ResidualReport raising;     // ||([H~, D^dag] - D^dag) psi|| / (1 + ||D^dag psi||)
    ResidualReport commutator;  // |<psi,[D,D^dag] psi> - (N(E+1) - N(E))| / (1 + |N(E+1) - N(E)|)
    double max_residual() const;
};

AlgebraReport verify_polynomial_algebra(const LadderOperatorSet& set,
                                        const std::vector<EigenState>& states);

/// max over states of |<psi, D^dag D psi> - N(E)| / (1 + N(E)).
ResidualReport verify_number_operator(const LadderOperatorSet& set,
                                      const std::vector<EigenState>& states);

// Interior norms of D psi and D^dag psi, one entry per state.
struct AnnihilationReport {
    ResidualReport by_d;
    ResidualReport by_d_dagger;
};
AnnihilationReport verify_annihilation(const LadderOperatorSet& set,
                                       const std::vector<EigenState>& states);

enum class LadderDirection { lower, raise };

struct LinearizedAction {
    double coefficient;  // |<psi_{n-+1}, D_L psi_n>|, or ||D psi_0|| for the extremal state
    int state_index;     // oscillator index of the neighbour, -1 when annihilated
    double overlap;      // |cos| between D_L psi_n and the neighbour
    int phase;           // sign of the raw overlap under the basis sign convention
};

/// Rescales D (or D^dag) on psi~_n by the scalar bracket of the linearized
/// operators evaluated on the oscillator number eigenvalue, projects onto
/// `basis` (transformed states, any order) and checks that the image lands on
/// the expected neighbour with overlap >= 0.999 (OverlapError otherwise).
LinearizedAction linearized_action(const LadderOperatorSet& set,
                                   const std::vector<EigenState>& basis,
                                   LadderDirection direction, int n);

// Upper component lives in the partner space, lower in the oscillator space.
struct BlockTestVector {
    EigenState upper;
    std::optional<EigenState> lower;  // empty means zero
};

struct SusyBlockReport {
    ResidualReport anticommutator;  // {Q1,Q2} and {Qi,Qi} - H_ss
    ResidualReport polynomial;      // H_ss v - prod_i (H^p - eps_i) v
    ResidualReport eigenvalue;      // Rayleigh quotient vs prod_i (E - eps_i), matched blocks only
};

SusyBlockReport verify_susy_block(const LadderOperatorSet& set,
                                  const std::vector<BlockTestVector>& blocks);

struct Ladder {
    double start_energy;
    std::optional<int> length;  // empty means infinite

    friend bool operator==(const Ladder&, const Ladder&) = default;
};

struct LadderStructure {
    std::vector<Ladder> ladders;  // ascending start energy

    std::string describe() const;
};

/// Classifies ladders from the roots of a generalized number operator.
/// Normalizable roots start ladders; a non-normalizable root sitting a
/// positive integer l above one of them cuts that ladder to length l.
/// Only normalizable roots must be distinct (DomainError otherwise).
LadderStructure analyze_ladder_structure(const std::vector<double>& roots,
                                         const std::vector<bool>& normalizable_flags);

struct RootSet {
    std::vector<double> roots;
    std::vector<bool> normalizable;
};

/// Roots of N(E) tagged by origin: 1/2 is normalizable when the transformed
/// ground state survives in `spectrum`, eps_i when its missing state does,
/// eps_i + 1 when a state sits there but none at eps_i.
RootSet number_root_flags(const FactorizationConfig& config, const std::vector<EigenState>& spectrum);

/// Ladders measured on an assembled spectrum. State a links to state b when
/// E_b = E_a + 1 and D^dag psi_a does not vanish (interior norm above 1e-2).
/// A tower is infinite when it reaches the highest assembled energy, finite
/// when the level one above its top is absent or D^dag annihilates the top.
LadderStructure spectrum_ladders(const LadderOperatorSet& set,
                                 const std::vector<EigenState>& spectrum);

bool same_structure(const LadderStructure& a, const LadderStructure& b, double energy_tol = 1e-9);

}  // namespace hsusy
