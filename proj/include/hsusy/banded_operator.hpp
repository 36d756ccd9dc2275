#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hsusy/grid.hpp"

namespace hsusy {

// Square (2k+1)-diagonal matrix acting on samples of a Grid. Row i holds
// entries for columns i-k .. i+k; out-of-range columns are stored as zero.
class BandedOperator {
public:
    BandedOperator(Grid grid, std::size_t bandwidth);

    static BandedOperator identity(const Grid& grid);
    static BandedOperator diagonal(const GridFunction& d);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return grid_.size(); }
    std::size_t bandwidth() const { return k_; }

    // Entry (row, col); zero outside the band.
    double at(std::size_t row, std::size_t col) const;
    // Mutable entry; (row, col) must lie inside the band.
    double& ref(std::size_t row, std::size_t col);

    GridFunction apply(const GridFunction& f) const;
    BandedOperator transpose() const;

    BandedOperator& operator+=(const BandedOperator& other);
    BandedOperator& operator*=(double s);
    friend BandedOperator operator+(BandedOperator a, const BandedOperator& b) { return a += b; }
    friend BandedOperator operator*(double s, BandedOperator a) { return a *= s; }

    // Matrix product this * rhs (apply rhs first).
    BandedOperator operator*(const BandedOperator& rhs) const;

    bool is_symmetric() const;

private:
    std::size_t width() const { return 2 * k_ + 1; }

    Grid grid_;
    std::size_t k_;
    std::vector<double> bands_;  // row-major, size() x width()
};

enum class LadderSign { annihilation, creation };

/// Central second-order stencil for d/dx (order 1) or d2/dx2 (order 2).
/// Boundary rows use one-sided stencils.
BandedOperator derivative_matrix(const Grid& grid, int order);

/// -1/2 d2/dx2 + V with Dirichlet walls just outside the grid.
/// Symmetric tridiagonal; throws NonFiniteError on non-finite V.
BandedOperator build_hamiltonian(const GridFunction& potential);

/// (1/sqrt 2)(d/dx + alpha) for annihilation, (1/sqrt 2)(-d/dx + alpha) for creation.
BandedOperator first_order_operator(const GridFunction& alpha, LadderSign sign);

/// ops[0] * ops[1] * ... (the last operator acts first).
BandedOperator compose(std::span<const BandedOperator> ops);

}  // namespace hsusy
