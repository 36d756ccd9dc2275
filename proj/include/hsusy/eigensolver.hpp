#pragma once

#include <cstddef>
#include <vector>

#include "hsusy/banded_operator.hpp"
#include "hsusy/grid.hpp"

namespace hsusy {

struct EigenDecomposition {
    std::vector<double> eigenvalues;        // ascending
    std::vector<GridFunction> eigenvectors;  // unit grid norm, sign convention applied
};

/// Lowest `k_lowest` eigenpairs of a symmetric tridiagonal operator.
/// Eigenvalues by Sturm-sequence bisection, eigenvectors by inverse iteration
/// (at most 50 sweeps, then ConvergenceError).
EigenDecomposition tridiagonal_eigensolve(const BandedOperator& hamiltonian,
                                          std::size_t k_lowest);

}  // namespace hsusy
