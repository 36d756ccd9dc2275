#pragma once

// Superpotential chains on top of the oscillator x^2/2: the closed-form
// level-1 seed, the algebraic recursion that builds level i from level i-1,
// the partner potentials, and an independent Riccati ODE integrator used as
// an oracle.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hsusy/grid.hpp"
#include "hsusy/specfun.hpp"

namespace hsusy {

struct Factorization {
    double epsilon;
    double nu;
};

// Factorization energies and seed weights, level 1 first.
// Energies must be strictly decreasing and not exceed 1/2. An empty
// configuration is the trivial (identity) chain.
class FactorizationConfig {
public:
    FactorizationConfig() = default;
    explicit FactorizationConfig(std::vector<Factorization> entries);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<Factorization>& entries() const { return entries_; }
    // 1-based level access.
    double epsilon(std::size_t level) const { return entries_.at(level - 1).epsilon; }
    double nu(std::size_t level) const { return entries_.at(level - 1).nu; }

private:
    std::vector<Factorization> entries_;
};

// Superpotential samples stored projectively: alpha = numerator / denominator
// with numerator^2 + denominator^2 = 1 at every point. The denominator
// carries the sign of the underlying transformation function, so poles of
// alpha are plain sign changes of the denominator.
class Superpotential {
public:
    Superpotential(Grid grid, std::vector<double> numerator, std::vector<double> denominator);
    static Superpotential from_values(const GridFunction& alpha);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return num_.size(); }
    double numerator(std::size_t i) const { return num_[i]; }
    double denominator(std::size_t i) const { return den_[i]; }
    double at(std::size_t i) const { return num_[i] / den_[i]; }

    // alpha samples; throws NonFiniteError when the entry carries a pole.
    GridFunction values() const;

    // Grid coordinates of denominator sign changes (midpoints) and of samples
    // with |denominator| < 1e-10.
    std::vector<double> sign_changes() const;
    std::vector<double> near_zero() const;
    bool regular() const { return sign_changes().empty() && near_zero().empty(); }

private:
    Grid grid_;
    std::vector<double> num_;
    std::vector<double> den_;
};

// Level-1 seed together with the diagnostics the singularity scan needs.
struct SeedSamples {
    Superpotential alpha;
    std::vector<double> sign_changes;   // nodes of u
    std::vector<double> cancellations;  // u lost all significant digits
};

/// Closed-form level-1 superpotential alpha_1(x, eps) = -x + u'/u on the grid,
/// u = 1F1((1-2eps)/4, 1/2; x^2) + 2 nu r(eps) x 1F1((3-2eps)/4, 3/2; x^2).
/// Never throws on nodes of u; they are reported in the diagnostics.
SeedSamples level1_seed(double epsilon, double nu, const Grid& grid,
                        const specfun::SpecfunConfig& config = {});

/// As level1_seed, but throws SingularityError when u changes sign or
/// loses significance anywhere on the grid.
GridFunction alpha1(double epsilon, double nu, const Grid& grid,
                    const specfun::SpecfunConfig& config = {});

/// max over the interior window of |alpha' + alpha^2 - 2 (V - eps)|,
/// alpha' by central differences.
double riccati_residual(const GridFunction& alpha, const GridFunction& potential, double epsilon);

/// Same check for a projective entry. Pole-free entries use the form above;
/// entries with poles switch to the reciprocal beta = 1/alpha form
/// |beta' - 1 + 2 (V - eps) beta^2| wherever |alpha| > 1.
double riccati_residual(const Superpotential& alpha, const GridFunction& potential,
                        double epsilon);

/// One step of the algebraic recursion:
/// alpha_i(x, eps_t) = -alpha_{i-1}(x, eps_p) - 2 (eps_p - eps_t) /
///                     (alpha_{i-1}(x, eps_p) - alpha_{i-1}(x, eps_t)).
/// `prev_at_prev` must be pole-free. The projective result may carry poles;
/// whether that is acceptable is the caller's decision.
Superpotential chain_step(const Superpotential& prev_at_prev, const Superpotential& prev_at_target,
                          double eps_prev, double eps_target);

/// Sampled-value form. Throws SingularityError when the denominator falls
/// below 1e-10 or changes sign on the interior window, DomainError when the
/// energies coincide to 1e-12.
GridFunction chain_step(const GridFunction& prev_at_prev, const GridFunction& prev_at_target,
                        double eps_prev, double eps_target);

// Triangular table alpha_i(x, eps_k), 1 <= i <= k <= m. Diagonal entries
// are pole-free; off-diagonal ones may carry poles.
class SuperpotentialTable {
public:
    SuperpotentialTable(Grid grid, FactorizationConfig config,
                        std::vector<std::vector<Superpotential>> rows);

    const Grid& grid() const { return grid_; }
    const FactorizationConfig& config() const { return config_; }
    std::size_t order() const { return config_.size(); }

    const Superpotential& entry(std::size_t level, std::size_t energy_index) const;
    // alpha_i(x, eps_i) as samples.
    const GridFunction& diagonal(std::size_t level) const;

private:
    Grid grid_;
    FactorizationConfig config_;
    std::vector<std::vector<Superpotential>> rows_;  // rows_[i-1][k-i]
    std::vector<GridFunction> diagonal_;
};

struct LevelScan {
    std::size_t level = 0;
    std::vector<double> sign_changes;   // poles of the diagonal superpotential
    std::vector<double> near_zero;      // |denominator| < 1e-10
    std::vector<double> cancellations;  // seeds that lost significance
    bool admissible() const {
        return sign_changes.empty() && near_zero.empty() && cancellations.empty();
    }
};

struct AdmissibilityReport {
    std::vector<LevelScan> levels;
    bool admissible = true;

    // First offending (level, x), if any.
    std::optional<std::pair<std::size_t, double>> first_singularity() const;
    std::string summary() const;
};

/// Per-level scan for nodes of u (level 1), sign changes or near-zero values
/// of the recursion denominator (levels >= 2), and loss of significance.
AdmissibilityReport singularity_scan(const FactorizationConfig& config, const Grid& grid,
                                     const specfun::SpecfunConfig& specfun_config = {});

/// Builds the full table; throws SingularityError (with level, energy index
/// and x) for inadmissible configurations.
SuperpotentialTable build_table(const FactorizationConfig& config, const Grid& grid,
                                const specfun::SpecfunConfig& specfun_config = {});

struct PartnerPotential {
    Grid grid;
    std::size_t level;
    GridFunction values;
    std::vector<Factorization> provenance;  // factorizations applied
};

GridFunction oscillator_potential(const Grid& grid);

/// V_i = x^2/2 - sum_{j<=i} alpha_j'(x, eps_j), derivatives by central differences.
PartnerPotential partner_potential(const SuperpotentialTable& table, std::size_t level);

struct RiccatiOracleResult {
    GridFunction alpha;       // NaN where invalid
    std::vector<bool> valid;  // false past a pole
    std::optional<double> pole_left;
    std::optional<double> pole_right;
    bool pole_encountered() const { return pole_left.has_value() || pole_right.has_value(); }
};

/// RK4 integration of alpha' = 2 (V - eps) - alpha^2 from x = 0 outwards at
/// step h/10, V interpolated by local cubics. A direction is abandoned once
/// |alpha| exceeds 1e8.
RiccatiOracleResult riccati_ode_oracle(const GridFunction& potential, double epsilon,
                                       double alpha_at_zero);

}  // namespace hsusy
