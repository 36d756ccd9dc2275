#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hsusy {

// Uniform discretization of [x_min, x_max] with n_points samples.
class Grid {
public:
    static constexpr double kDefaultHalfWidth = 12.0;
    static constexpr std::size_t kDefaultPoints = 2401;
    // Residual norms are taken over |x| <= kInteriorFraction * max(|x_min|, |x_max|).
    static constexpr double kInteriorFraction = 0.8;

    Grid(double x_min, double x_max, std::size_t n_points);
    static Grid symmetric(double half_width = kDefaultHalfWidth,
                          std::size_t n_points = kDefaultPoints);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_points_; }
    double spacing() const { return h_; }
    double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * h_; }
    bool is_symmetric() const;

    // Index range [first, last] of the interior window.
    std::size_t interior_first() const { return interior_first_; }
    std::size_t interior_last() const { return interior_last_; }
    bool in_interior(std::size_t i) const {
        return i >= interior_first_ && i <= interior_last_;
    }

    // Index of the sample closest to x = 0 (clamped to the grid).
    std::size_t index_nearest_zero() const;

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_points_ == b.n_points_;
    }

private:
    double x_min_;
    double x_max_;
    std::size_t n_points_;
    double h_;
    std::size_t interior_first_;
    std::size_t interior_last_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

// Real samples of a function on a Grid.
class GridFunction {
public:
    explicit GridFunction(Grid grid);  // zeros
    GridFunction(Grid grid, std::vector<double> values);
    static GridFunction sample(const Grid& grid, const std::function<double(double)>& f);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    bool all_finite() const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double s);

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(double s, GridFunction a) { return a *= s; }
    friend GridFunction operator*(GridFunction a, double s) { return a *= s; }

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Trapezoidal quadrature of f * g over the whole grid.
double inner_product(const GridFunction& f, const GridFunction& g);
double norm(const GridFunction& f);

// Trapezoidal L2 norm and max-norm restricted to the interior window.
double interior_norm(const GridFunction& f);
double interior_max_abs(const GridFunction& f);

// Scale to unit grid norm; the first sample exceeding 1e-6 in magnitude
// is made positive (1e-6 absolute, relative for tiny vectors). Returns the norm before scaling.
double normalize_in_place(GridFunction& f);
// Sign flip only; returns the factor applied (+1 or -1).
int apply_sign_convention(GridFunction& f);

// Number of sign changes among samples whose magnitude exceeds
// `threshold` times the peak, restricted to the interior window.
int count_interior_sign_changes(const GridFunction& f, double threshold = 1e-6);

}  // namespace hsusy
