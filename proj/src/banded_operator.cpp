#include "hsusy/banded_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hsusy/errors.hpp"

namespace hsusy {

BandedOperator::BandedOperator(Grid grid, std::size_t bandwidth)
    : grid_(grid),
      k_(std::min(bandwidth, grid.size() - 1)),
      bands_(grid.size() * (2 * std::min(bandwidth, grid.size() - 1) + 1), 0.0) {}

BandedOperator BandedOperator::identity(const Grid& grid) {
    BandedOperator op(grid, 0);
    for (std::size_t i = 0; i < op.size(); ++i) op.ref(i, i) = 1.0;
    return op;
}

BandedOperator BandedOperator::diagonal(const GridFunction& d) {
    BandedOperator op(d.grid(), 0);
    for (std::size_t i = 0; i < op.size(); ++i) op.ref(i, i) = d[i];
    return op;
}

double BandedOperator::at(std::size_t row, std::size_t col) const {
    const std::size_t lo = row >= k_ ? row - k_ : 0;
    if (col < lo || col > row + k_ || col >= size()) return 0.0;
    return bands_[row * width() + (col + k_ - row)];
}

double& BandedOperator::ref(std::size_t row, std::size_t col) {
    return bands_[row * width() + (col + k_ - row)];
}

GridFunction BandedOperator::apply(const GridFunction& f) const {
    require_same_grid(grid_, f.grid(), "BandedOperator::apply");
    const std::size_t n = size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= k_ ? i - k_ : 0;
        const std::size_t hi = std::min(i + k_, n - 1);
        const double* row = &bands_[i * width() + (lo + k_ - i)];
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += row[j - lo] * f[j];
        out[i] = acc;
    }
    return GridFunction(grid_, std::move(out));
}

BandedOperator BandedOperator::transpose() const {
    BandedOperator t(grid_, k_);
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= k_ ? i - k_ : 0;
        const std::size_t hi = std::min(i + k_, n - 1);
        for (std::size_t j = lo; j <= hi; ++j) t.ref(j, i) = at(i, j);
    }
    return t;
}

BandedOperator& BandedOperator::operator+=(const BandedOperator& other) {
    require_same_grid(grid_, other.grid_, "BandedOperator::operator+=");
    if (other.k_ > k_) {
        BandedOperator wide(grid_, other.k_);
        wide += *this;
        *this = std::move(wide);
    }
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= other.k_ ? i - other.k_ : 0;
        const std::size_t hi = std::min(i + other.k_, n - 1);
        for (std::size_t j = lo; j <= hi; ++j) ref(i, j) += other.at(i, j);
    }
    return *this;
}

BandedOperator& BandedOperator::operator*=(double s) {
    for (double& v : bands_) v *= s;
    return *this;
}

BandedOperator BandedOperator::operator*(const BandedOperator& rhs) const {
    require_same_grid(grid_, rhs.grid_, "BandedOperator::operator*");
    const std::size_t n = size();
    BandedOperator out(grid_, k_ + rhs.k_);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= k_ ? i - k_ : 0;
        const std::size_t hi = std::min(i + k_, n - 1);
        for (std::size_t m = lo; m <= hi; ++m) {
            const double a = at(i, m);
            if (a == 0.0) continue;
            const std::size_t lo2 = m >= rhs.k_ ? m - rhs.k_ : 0;
            const std::size_t hi2 = std::min(m + rhs.k_, n - 1);
            for (std::size_t j = lo2; j <= hi2; ++j) out.ref(i, j) += a * rhs.at(m, j);
        }
    }
    return out;
}

bool BandedOperator::is_symmetric() const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j <= std::min(i + k_, n - 1); ++j) {
            if (at(i, j) != at(j, i)) return false;
        }
    }
    return true;
}

BandedOperator derivative_matrix(const Grid& grid, int order) {
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    if (order == 1) {
        BandedOperator d(grid, 1);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            d.ref(i, i - 1) = -0.5 / h;
            d.ref(i, i + 1) = 0.5 / h;
        }
        d.ref(0, 0) = -1.0 / h;
        d.ref(0, 1) = 1.0 / h;
        d.ref(n - 1, n - 2) = -1.0 / h;
        d.ref(n - 1, n - 1) = 1.0 / h;
        return d;
    }
    if (order == 2) {
        const double c = 1.0 / (h * h);
        BandedOperator d(grid, 2);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            d.ref(i, i - 1) = c;
            d.ref(i, i) = -2.0 * c;
            d.ref(i, i + 1) = c;
        }
        d.ref(0, 0) = c;
        d.ref(0, 1) = -2.0 * c;
        d.ref(0, 2) = c;
        d.ref(n - 1, n - 3) = c;
        d.ref(n - 1, n - 2) = -2.0 * c;
        d.ref(n - 1, n - 1) = c;
        return d;
    }
    throw DomainError("derivative_matrix: order must be 1 or 2");
}

BandedOperator build_hamiltonian(const GridFunction& potential) {
    if (!potential.all_finite()) {
        throw NonFiniteError("build_hamiltonian: potential has non-finite samples");
    }
    const Grid& grid = potential.grid();
    const std::size_t n = grid.size();
    const double c = 0.5 / (grid.spacing() * grid.spacing());
    BandedOperator hamiltonian(grid, 1);
    for (std::size_t i = 0; i < n; ++i) {
        hamiltonian.ref(i, i) = 2.0 * c + potential[i];
        if (i > 0) hamiltonian.ref(i, i - 1) = -c;
        if (i + 1 < n) hamiltonian.ref(i, i + 1) = -c;
    }
    return hamiltonian;
}

BandedOperator first_order_operator(const GridFunction& alpha, LadderSign sign) {
    if (!alpha.all_finite()) {
        throw NonFiniteError("first_order_operator: superpotential has non-finite samples");
    }
    BandedOperator op = derivative_matrix(alpha.grid(), 1);
    if (sign == LadderSign::creation) op *= -1.0;
    op += BandedOperator::diagonal(alpha);
    op *= 1.0 / std::numbers::sqrt2;
    return op;
}

BandedOperator compose(std::span<const BandedOperator> ops) {
    if (ops.empty()) {
        throw DomainError("compose: empty operator list");
    }
    BandedOperator out = ops.front();
    for (std::size_t i = 1; i < ops.size(); ++i) out = out * ops[i];
    return out;
}

}  // namespace hsusy
