#include "hsusy/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsusy/errors.hpp"

namespace hsusy {

Grid::Grid(double x_min, double x_max, std::size_t n_points)
    : x_min_(x_min), x_max_(x_max), n_points_(n_points) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
        throw DomainError("Grid: requires finite x_min < x_max");
    }
    if (n_points < 3) {
        throw DomainError("Grid: requires at least 3 points");
    }
    h_ = (x_max - x_min) / static_cast<double>(n_points - 1);

    const double limit = kInteriorFraction * std::max(std::abs(x_min), std::abs(x_max));
    const double tol = 1e-9 * h_;
    interior_first_ = n_points_;
    interior_last_ = 0;
    for (std::size_t i = 0; i < n_points_; ++i) {
        if (std::abs(x(i)) <= limit + tol) {
            interior_first_ = std::min(interior_first_, i);
            interior_last_ = std::max(interior_last_, i);
        }
    }
    if (interior_first_ > interior_last_) {
        // Window does not intersect the grid (grid far from the origin).
        interior_first_ = 1;
        interior_last_ = n_points_ - 2;
    }
    // Keep the window off the boundary rows.
    interior_first_ = std::max<std::size_t>(interior_first_, 1);
    interior_last_ = std::min(interior_last_, n_points_ - 2);
}

Grid Grid::symmetric(double half_width, std::size_t n_points) {
    return Grid(-half_width, half_width, n_points);
}

bool Grid::is_symmetric() const { return x_min_ == -x_max_; }

std::size_t Grid::index_nearest_zero() const {
    if (x_min_ >= 0.0) return 0;
    if (x_max_ <= 0.0) return n_points_ - 1;
    const auto i = static_cast<std::size_t>(std::llround(-x_min_ / h_));
    return std::min(i, n_points_ - 1);
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) {
        throw GridMismatchError(std::string(where) + ": operands live on different grids");
    }
}

GridFunction::GridFunction(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw GridMismatchError("GridFunction: sample count does not match grid");
    }
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.x(i));
    return GridFunction(grid, std::move(v));
}

bool GridFunction::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_grid(grid_, other.grid_, "GridFunction::operator+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_grid(grid_, other.grid_, "GridFunction::operator-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

double inner_product(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f.grid(), g.grid(), "inner_product");
    const std::size_t n = f.size();
    double sum = 0.5 * (f[0] * g[0] + f[n - 1] * g[n - 1]);
    for (std::size_t i = 1; i + 1 < n; ++i) sum += f[i] * g[i];
    return sum * f.grid().spacing();
}

double norm(const GridFunction& f) { return std::sqrt(inner_product(f, f)); }

double interior_norm(const GridFunction& f) {
    const Grid& g = f.grid();
    const std::size_t a = g.interior_first();
    const std::size_t b = g.interior_last();
    double sum = 0.5 * (f[a] * f[a] + f[b] * f[b]);
    for (std::size_t i = a + 1; i < b; ++i) sum += f[i] * f[i];
    return std::sqrt(sum * g.spacing());
}

double interior_max_abs(const GridFunction& f) {
    const Grid& g = f.grid();
    double m = 0.0;
    for (std::size_t i = g.interior_first(); i <= g.interior_last(); ++i) {
        m = std::max(m, std::abs(f[i]));
    }
    return m;
}

int apply_sign_convention(GridFunction& f) {
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 1;
    const double threshold = peak > 1e-3 ? 1e-6 : 1e-6 * peak;
    for (double v : f.values()) {
        if (std::abs(v) > threshold) {
            if (v < 0.0) {
                f *= -1.0;
                return -1;
            }
            return 1;
        }
    }
    return 1;
}

double normalize_in_place(GridFunction& f) {
    const double n = norm(f);
    if (n > 0.0 && std::isfinite(n)) f *= 1.0 / n;
    apply_sign_convention(f);
    return n;
}

int count_interior_sign_changes(const GridFunction& f, double threshold) {
    const Grid& g = f.grid();
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, std::abs(v));
    int changes = 0;
    int last = 0;
    for (std::size_t i = g.interior_first(); i <= g.interior_last(); ++i) {
        if (std::abs(f[i]) <= threshold * peak) continue;
        const int s = f[i] > 0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

}  // namespace hsusy
