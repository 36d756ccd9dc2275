#include "hsusy/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hsusy/banded_operator.hpp"
#include "hsusy/errors.hpp"

namespace hsusy {

namespace {

constexpr double kNearZero = 1e-10;
constexpr double kDegenerateEnergy = 1e-12;
// |u| below this fraction of |F1| + |c x F2| means u has no significant digits left.
constexpr double kCancellationRatio = 1e-8;
// A lone small sample next to a genuine node is not a loss of significance.
constexpr std::size_t kCancellationRun = 3;
constexpr double kOdeBlowUp = 1e8;
constexpr int kOdeSubsteps = 10;

std::vector<double> sign_change_midpoints(const Grid& grid, const std::vector<double>& v) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if ((v[i] > 0.0 && v[i + 1] < 0.0) || (v[i] < 0.0 && v[i + 1] > 0.0)) {
            out.push_back(0.5 * (grid.x(i) + grid.x(i + 1)));
        }
    }
    return out;
}

void normalize_pair(double& num, double& den) {
    const double r = std::hypot(num, den);
    if (r > 0.0 && std::isfinite(r)) {
        num /= r;
        den /= r;
    }
}

}  // namespace

FactorizationConfig::FactorizationConfig(std::vector<Factorization> entries)
    : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!std::isfinite(e.epsilon) || !std::isfinite(e.nu)) {
            throw DomainError("FactorizationConfig: non-finite entry");
        }
        if (e.epsilon > 0.5) {
            throw DomainError("FactorizationConfig: factorization energies must not exceed 1/2");
        }
        if (i > 0 && !(e.epsilon < entries_[i - 1].epsilon)) {
            throw DomainError(
                "FactorizationConfig: energies must be strictly decreasing (eps_m < ... < eps_1)");
        }
    }
}

Superpotential::Superpotential(Grid grid, std::vector<double> numerator,
                               std::vector<double> denominator)
    : grid_(grid), num_(std::move(numerator)), den_(std::move(denominator)) {
    if (num_.size() != grid_.size() || den_.size() != grid_.size()) {
        throw GridMismatchError("Superpotential: sample count does not match grid");
    }
    for (std::size_t i = 0; i < num_.size(); ++i) {
        if (!std::isfinite(num_[i]) || !std::isfinite(den_[i]) ||
            (num_[i] == 0.0 && den_[i] == 0.0)) {
            throw NonFiniteError("Superpotential: undefined projective sample at x = " +
                                 std::to_string(grid_.x(i)));
        }
        normalize_pair(num_[i], den_[i]);
    }
}

Superpotential Superpotential::from_values(const GridFunction& alpha) {
    if (!alpha.all_finite()) {
        throw NonFiniteError("Superpotential::from_values: non-finite samples");
    }
    std::vector<double> num(alpha.size()), den(alpha.size(), 1.0);
    for (std::size_t i = 0; i < alpha.size(); ++i) num[i] = alpha[i];
    return Superpotential(alpha.grid(), std::move(num), std::move(den));
}

GridFunction Superpotential::values() const {
    if (!regular()) {
        throw NonFiniteError("Superpotential::values: entry carries a pole");
    }
    std::vector<double> v(num_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = num_[i] / den_[i];
    return GridFunction(grid_, std::move(v));
}

std::vector<double> Superpotential::sign_changes() const {
    return sign_change_midpoints(grid_, den_);
}

std::vector<double> Superpotential::near_zero() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < den_.size(); ++i) {
        if (std::abs(den_[i]) < kNearZero) out.push_back(grid_.x(i));
    }
    return out;
}

SeedSamples level1_seed(double epsilon, double nu, const Grid& grid,
                        const specfun::SpecfunConfig& config) {
    const double a_even = (1.0 - 2.0 * epsilon) / 4.0;
    const double a_odd = (3.0 - 2.0 * epsilon) / 4.0;
    const double weight = 2.0 * nu * specfun::gamma_ratio(epsilon);

    const std::size_t n = grid.size();
    std::vector<double> num(n), den(n);
    std::vector<bool> lost(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const double z = x * x;
        // Every term is O(e^z); scale it out before forming u and u'.
        const double f_even = specfun::kummer_1f1_log(a_even, 0.5, z, config).scaled(z);
        const double f_odd = specfun::kummer_1f1_log(a_odd, 1.5, z, config).scaled(z);
        const double df_even = specfun::kummer_1f1_dz_log(a_even, 0.5, z, config).scaled(z);
        const double df_odd = specfun::kummer_1f1_dz_log(a_odd, 1.5, z, config).scaled(z);

        const double u = f_even + weight * x * f_odd;
        const double du = 2.0 * x * df_even + weight * f_odd + 2.0 * weight * z * df_odd;
        // alpha_1 = -x + u'/u
        num[i] = du - x * u;
        den[i] = u;
        if (std::abs(u) < kCancellationRatio * (std::abs(f_even) + std::abs(weight * x * f_odd))) {
            lost[i] = true;
        }
        if (num[i] == 0.0 && den[i] == 0.0) den[i] = std::numeric_limits<double>::min();
    }

    std::vector<double> cancellations;
    std::size_t run = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        if (i < n && lost[i]) {
            ++run;
            continue;
        }
        if (run >= kCancellationRun) {
            for (std::size_t j = i - run; j < i; ++j) cancellations.push_back(grid.x(j));
        }
        run = 0;
    }

    Superpotential alpha(grid, std::move(num), std::move(den));
    std::vector<double> changes = alpha.sign_changes();
    return {std::move(alpha), std::move(changes), std::move(cancellations)};
}

GridFunction alpha1(double epsilon, double nu, const Grid& grid,
                    const specfun::SpecfunConfig& config) {
    if (epsilon > 0.5) {
        throw DomainError("alpha1: factorization energy must not exceed 1/2");
    }
    SeedSamples seed = level1_seed(epsilon, nu, grid, config);
    if (!seed.sign_changes.empty()) {
        throw SingularityError("alpha1: transformation function has a node (pole in alpha_1) at x = " +
                                   std::to_string(seed.sign_changes.front()),
                               1, 1, seed.sign_changes.front());
    }
    if (!seed.cancellations.empty()) {
        throw SingularityError("alpha1: transformation function lost significance at x = " +
                                   std::to_string(seed.cancellations.front()),
                               1, 1, seed.cancellations.front());
    }
    const auto zeros = seed.alpha.near_zero();
    if (!zeros.empty()) {
        throw SingularityError("alpha1: transformation function vanishes at x = " +
                                   std::to_string(zeros.front()),
                               1, 1, zeros.front());
    }
    return seed.alpha.values();
}

double riccati_residual(const GridFunction& alpha, const GridFunction& potential, double epsilon) {
    require_same_grid(alpha.grid(), potential.grid(), "riccati_residual");
    const Grid& grid = alpha.grid();
    const double h = grid.spacing();
    double worst = 0.0;
    for (std::size_t i = grid.interior_first(); i <= grid.interior_last(); ++i) {
        const double d = (alpha[i + 1] - alpha[i - 1]) / (2.0 * h);
        const double r = d + alpha[i] * alpha[i] - 2.0 * (potential[i] - epsilon);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double riccati_residual(const Superpotential& alpha, const GridFunction& potential,
                        double epsilon) {
    require_same_grid(alpha.grid(), potential.grid(), "riccati_residual");
    if (alpha.regular()) {
        return riccati_residual(alpha.values(), potential, epsilon);
    }
    const Grid& grid = alpha.grid();
    const double h = grid.spacing();
    double worst = 0.0;
    for (std::size_t i = grid.interior_first(); i <= grid.interior_last(); ++i) {
        const double f = 2.0 * (potential[i] - epsilon);
        double r;
        if (std::abs(alpha.numerator(i)) <= std::abs(alpha.denominator(i))) {
            // |alpha| <= 1 here; neighbours may still sit past a pole, so
            // difference the reciprocal only if the stencil straddles one.
            const double lo = alpha.denominator(i - 1);
            const double hi = alpha.denominator(i + 1);
            const double mid = alpha.denominator(i);
            if ((lo > 0) != (mid > 0) || (hi > 0) != (mid > 0)) continue;
            const double d = (alpha.at(i + 1) - alpha.at(i - 1)) / (2.0 * h);
            r = d + alpha.at(i) * alpha.at(i) - f;
        } else {
            const auto beta = [&](std::size_t j) { return alpha.denominator(j) / alpha.numerator(j); };
            const double lo = alpha.numerator(i - 1);
            const double hi = alpha.numerator(i + 1);
            const double mid = alpha.numerator(i);
            if ((lo > 0) != (mid > 0) || (hi > 0) != (mid > 0)) continue;
            const double d = (beta(i + 1) - beta(i - 1)) / (2.0 * h);
            r = d - 1.0 + f * beta(i) * beta(i);
        }
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

Superpotential chain_step(const Superpotential& prev_at_prev, const Superpotential& prev_at_target,
                          double eps_prev, double eps_target) {
    require_same_grid(prev_at_prev.grid(), prev_at_target.grid(), "chain_step");
    if (std::abs(eps_prev - eps_target) < kDegenerateEnergy) {
        throw DomainError("chain_step: degenerate factorization energies");
    }
    if (!prev_at_prev.regular()) {
        throw SingularityError("chain_step: previous-level diagonal superpotential carries a pole", 0,
                               0, prev_at_prev.sign_changes().empty()
                                      ? prev_at_prev.near_zero().front()
                                      : prev_at_prev.sign_changes().front());
    }
    const double gap = eps_prev - eps_target;
    const std::size_t n = prev_at_prev.size();
    std::vector<double> num(n), den(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ap = prev_at_prev.at(i);
        const double nt = prev_at_target.numerator(i);
        const double dt = prev_at_target.denominator(i);
        // alpha_p - alpha_t = (ap dt - nt) / dt
        den[i] = ap * dt - nt;
        num[i] = -ap * den[i] - 2.0 * gap * dt;
        if (num[i] == 0.0 && den[i] == 0.0) den[i] = std::numeric_limits<double>::min();
    }
    return Superpotential(prev_at_prev.grid(), std::move(num), std::move(den));
}

GridFunction chain_step(const GridFunction& prev_at_prev, const GridFunction& prev_at_target,
                        double eps_prev, double eps_target) {
    require_same_grid(prev_at_prev.grid(), prev_at_target.grid(), "chain_step");
    if (std::abs(eps_prev - eps_target) < kDegenerateEnergy) {
        throw DomainError("chain_step: degenerate factorization energies");
    }
    const Grid& grid = prev_at_prev.grid();
    const std::size_t n = grid.size();
    std::vector<double> den(n);
    for (std::size_t i = 0; i < n; ++i) den[i] = prev_at_prev[i] - prev_at_target[i];

    for (std::size_t i = grid.interior_first(); i <= grid.interior_last(); ++i) {
        if (std::abs(den[i]) < kNearZero) {
            throw SingularityError("chain_step: denominator vanishes at x = " + std::to_string(grid.x(i)),
                                   0, 0, grid.x(i));
        }
        // A sign change of the denominator is a zero crossing when it is
        // continuous across the cell; jumps through infinity (a pole of the
        // target-energy entry) leave the new superpotential finite.
        if (i < grid.interior_last() && (den[i] > 0.0) != (den[i + 1] > 0.0) &&
            std::abs(den[i] - den[i + 1]) <= 1.0) {
            const double x = 0.5 * (grid.x(i) + grid.x(i + 1));
            throw SingularityError("chain_step: denominator changes sign near x = " + std::to_string(x),
                                   0, 0, x);
        }
    }
    const double gap = eps_prev - eps_target;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = -prev_at_prev[i] - 2.0 * gap / den[i];
    return GridFunction(grid, std::move(out));
}

SuperpotentialTable::SuperpotentialTable(Grid grid, FactorizationConfig config,
                                         std::vector<std::vector<Superpotential>> rows)
    : grid_(grid), config_(std::move(config)), rows_(std::move(rows)) {
    const std::size_t m = config_.size();
    if (rows_.size() != m) {
        throw DomainError("SuperpotentialTable: row count does not match chain order");
    }
    diagonal_.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (rows_[i].size() != m - i) {
            throw DomainError("SuperpotentialTable: row " + std::to_string(i + 1) + " has wrong length");
        }
        diagonal_.push_back(rows_[i].front().values());
    }
}

const Superpotential& SuperpotentialTable::entry(std::size_t level, std::size_t energy_index) const {
    if (level < 1 || level > energy_index || energy_index > order()) {
        throw DomainError("SuperpotentialTable::entry: requires 1 <= level <= energy index <= m");
    }
    return rows_[level - 1][energy_index - level];
}

const GridFunction& SuperpotentialTable::diagonal(std::size_t level) const {
    if (level < 1 || level > order()) {
        throw DomainError("SuperpotentialTable::diagonal: level out of range");
    }
    return diagonal_[level - 1];
}

std::optional<std::pair<std::size_t, double>> AdmissibilityReport::first_singularity() const {
    for (const auto& l : levels) {
        if (!l.sign_changes.empty()) return std::make_pair(l.level, l.sign_changes.front());
        if (!l.near_zero.empty()) return std::make_pair(l.level, l.near_zero.front());
        if (!l.cancellations.empty()) return std::make_pair(l.level, l.cancellations.front());
    }
    return std::nullopt;
}

std::string AdmissibilityReport::summary() const {
    std::ostringstream os;
    os << (admissible ? "admissible" : "inadmissible");
    for (const auto& l : levels) {
        if (l.admissible()) continue;
        os << "; level " << l.level << ":";
        if (!l.sign_changes.empty()) os << " " << l.sign_changes.size() << " sign change(s) from x = " << l.sign_changes.front();
        if (!l.near_zero.empty()) os << " " << l.near_zero.size() << " near-zero sample(s) from x = " << l.near_zero.front();
        if (!l.cancellations.empty()) os << " significance lost from x = " << l.cancellations.front();
    }
    return os.str();
}

namespace {

struct ChainBuild {
    std::vector<std::vector<Superpotential>> rows;
    AdmissibilityReport report;
    std::optional<std::size_t> failed_energy_index;  // energy index k of the first failure
};

// Builds as many levels as possible; stops at the first level whose
// diagonal entry is singular (later levels would be meaningless).
ChainBuild build_chain(const FactorizationConfig& config, const Grid& grid,
                       const specfun::SpecfunConfig& specfun_config) {
    ChainBuild build;
    const std::size_t m = config.size();
    if (m == 0) return build;

    std::vector<Superpotential> level1;
    LevelScan scan1;
    scan1.level = 1;
    for (std::size_t k = 1; k <= m; ++k) {
        SeedSamples seed = level1_seed(config.epsilon(k), config.nu(k), grid, specfun_config);
        if (k == 1) {
            scan1.sign_changes = seed.sign_changes;
            scan1.near_zero = seed.alpha.near_zero();
        }
        if (!seed.cancellations.empty() && scan1.cancellations.empty()) {
            scan1.cancellations = seed.cancellations;
            if (!build.failed_energy_index) build.failed_energy_index = k;
        }
        level1.push_back(std::move(seed.alpha));
    }
    if (!scan1.sign_changes.empty() || !scan1.near_zero.empty()) build.failed_energy_index = 1;
    const bool ok1 = scan1.admissible();
    build.report.levels.push_back(std::move(scan1));
    build.rows.push_back(std::move(level1));
    if (!ok1) {
        build.report.admissible = false;
        return build;
    }

    for (std::size_t i = 2; i <= m; ++i) {
        const auto& prev = build.rows[i - 2];
        std::vector<Superpotential> row;
        for (std::size_t k = i; k <= m; ++k) {
            row.push_back(chain_step(prev.front(), prev[k - i + 1], config.epsilon(i - 1),
                                     config.epsilon(k)));
        }
        LevelScan scan;
        scan.level = i;
        scan.sign_changes = row.front().sign_changes();
        scan.near_zero = row.front().near_zero();
        const bool ok = scan.admissible();
        build.report.levels.push_back(std::move(scan));
        build.rows.push_back(std::move(row));
        if (!ok) {
            build.report.admissible = false;
            build.failed_energy_index = i;
            return build;
        }
    }
    return build;
}

}  // namespace

AdmissibilityReport singularity_scan(const FactorizationConfig& config, const Grid& grid,
                                     const specfun::SpecfunConfig& specfun_config) {
    return build_chain(config, grid, specfun_config).report;
}

SuperpotentialTable build_table(const FactorizationConfig& config, const Grid& grid,
                                const specfun::SpecfunConfig& specfun_config) {
    ChainBuild build = build_chain(config, grid, specfun_config);
    if (!build.report.admissible) {
        const auto where = build.report.first_singularity();
        const std::size_t level = where ? where->first : 0;
        const double x = where ? where->second : 0.0;
        const std::size_t k = build.failed_energy_index.value_or(level);
        std::ostringstream os;
        os << "build_table: singular chain at level " << level << " (energy index " << k
           << ") near x = " << x << " [" << build.report.summary() << "]";
        throw SingularityError(os.str(), static_cast<int>(level), static_cast<int>(k), x);
    }
    return SuperpotentialTable(grid, config, std::move(build.rows));
}

GridFunction oscillator_potential(const Grid& grid) {
    return GridFunction::sample(grid, [](double x) { return 0.5 * x * x; });
}

PartnerPotential partner_potential(const SuperpotentialTable& table, std::size_t level) {
    if (level > table.order()) {
        throw DomainError("partner_potential: level exceeds chain order");
    }
    const Grid& grid = table.grid();
    GridFunction v = oscillator_potential(grid);
    const BandedOperator d1 = derivative_matrix(grid, 1);
    std::vector<Factorization> provenance;
    for (std::size_t j = 1; j <= level; ++j) {
        v -= d1.apply(table.diagonal(j));
        provenance.push_back(table.config().entries()[j - 1]);
    }
    if (!v.all_finite()) {
        throw NonFiniteError("partner_potential: non-finite potential at level " + std::to_string(level));
    }
    return {grid, level, std::move(v), std::move(provenance)};
}

namespace {

// Local cubic (4-point Lagrange) interpolation of grid samples.
double interpolate_cubic(const GridFunction& f, double x) {
    const Grid& g = f.grid();
    const double h = g.spacing();
    const double s = (x - g.x_min()) / h;
    const auto n = static_cast<long>(g.size());
    long j = static_cast<long>(std::floor(s));
    j = std::clamp(j - 1, 0L, n - 4);
    const double t = s - static_cast<double>(j);  // position relative to node j, in cells
    const double f0 = f[static_cast<std::size_t>(j)];
    const double f1 = f[static_cast<std::size_t>(j + 1)];
    const double f2 = f[static_cast<std::size_t>(j + 2)];
    const double f3 = f[static_cast<std::size_t>(j + 3)];
    const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    return l0 * f0 + l1 * f1 + l2 * f2 + l3 * f3;
}

}  // namespace

RiccatiOracleResult riccati_ode_oracle(const GridFunction& potential, double epsilon,
                                       double alpha_at_zero) {
    if (!potential.all_finite() || !std::isfinite(alpha_at_zero)) {
        throw NonFiniteError("riccati_ode_oracle: non-finite input");
    }
    const Grid& grid = potential.grid();
    if (grid.size() < 4) {
        throw DomainError("riccati_ode_oracle: grid too small for cubic interpolation");
    }
    const std::size_t n = grid.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    RiccatiOracleResult result{GridFunction(grid, std::vector<double>(n, nan)),
                               std::vector<bool>(n, false), std::nullopt, std::nullopt};

    auto rhs = [&](double x, double a) {
        return 2.0 * (interpolate_cubic(potential, x) - epsilon) - a * a;
    };
    const double step = grid.spacing() / kOdeSubsteps;

    // Integrates towards each grid point in `order`, starting at x = 0.
    auto sweep = [&](const std::vector<std::size_t>& order, std::optional<double>& pole) {
        double x = 0.0;
        double a = alpha_at_zero;
        for (std::size_t idx : order) {
            const double target = grid.x(idx);
            const double span = target - x;
            const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / step - 1e-9)));
            const double dx = span / steps;
            for (int s = 0; s < steps; ++s) {
                const double k1 = rhs(x, a);
                const double k2 = rhs(x + 0.5 * dx, a + 0.5 * dx * k1);
                const double k3 = rhs(x + 0.5 * dx, a + 0.5 * dx * k2);
                const double k4 = rhs(x + dx, a + dx * k3);
                a += dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                x += dx;
                if (!std::isfinite(a) || std::abs(a) > kOdeBlowUp) {
                    pole = x;
                    return;
                }
            }
            x = target;
            result.alpha[idx] = a;
            result.valid[idx] = true;
        }
    };

    std::vector<std::size_t> right, left;
    for (std::size_t i = 0; i < n; ++i) {
        if (grid.x(i) >= 0.0) right.push_back(i);
    }
    for (std::size_t i = n; i-- > 0;) {
        if (grid.x(i) < 0.0) left.push_back(i);
    }
    sweep(right, result.pole_right);
    sweep(left, result.pole_left);
    return result;
}

}  // namespace hsusy
