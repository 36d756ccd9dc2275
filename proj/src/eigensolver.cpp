#include "hsusy/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hsusy/errors.hpp"

namespace hsusy {

namespace {

constexpr int kMaxInverseIterations = 50;

struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;  // off[i] couples i and i+1
};

Tridiagonal extract(const BandedOperator& op) {
    const std::size_t n = op.size();
    Tridiagonal t{std::vector<double>(n), std::vector<double>(n > 0 ? n - 1 : 0)};
    for (std::size_t i = 0; i < n; ++i) {
        t.diag[i] = op.at(i, i);
        if (i + 1 < n) {
            t.off[i] = op.at(i, i + 1);
            if (op.at(i + 1, i) != t.off[i]) {
                throw DomainError("tridiagonal_eigensolve: operator is not symmetric");
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j <= std::min(i + op.bandwidth(), n - 1); ++j) {
            if (op.at(i, j) != 0.0 || op.at(j, i) != 0.0) {
                throw DomainError("tridiagonal_eigensolve: operator is not tridiagonal");
            }
        }
    }
    return t;
}

// Number of eigenvalues strictly below lambda (LDL^T inertia).
std::size_t sturm_count(const Tridiagonal& t, double lambda) {
    const double tiny = std::numeric_limits<double>::min();
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < t.diag.size(); ++i) {
        d = t.diag[i] - lambda - (i > 0 ? t.off[i - 1] * t.off[i - 1] / d : 0.0);
        // an exact zero pivot counts as negative
        if (std::abs(d) < tiny) d = -tiny;
        if (d < 0.0) ++count;
    }
    return count;
}

double operator_norm_bound(const Tridiagonal& t) {
    double m = 0.0;
    for (std::size_t i = 0; i < t.diag.size(); ++i) {
        double r = std::abs(t.diag[i]);
        if (i > 0) r += std::abs(t.off[i - 1]);
        if (i < t.off.size()) r += std::abs(t.off[i]);
        m = std::max(m, r);
    }
    return m;
}

// Solve (T - shift) x = b by Gaussian elimination with partial pivoting.
// Pivots smaller than pivot_floor are replaced so that the (nearly singular)
// system at an accurate eigenvalue still yields a finite direction.
std::vector<double> shifted_solve(const Tridiagonal& t, double shift, std::vector<double> b,
                                  double pivot_floor) {
    const std::size_t n = t.diag.size();
    std::vector<double> d(n), du(n, 0.0), dl(n, 0.0), du2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = t.diag[i] - shift;
        if (i + 1 < n) {
            du[i] = t.off[i];
            dl[i] = t.off[i];
        }
    }
    auto floor_pivot = [pivot_floor](double& p) {
        if (std::abs(p) < pivot_floor) p = p < 0.0 ? -pivot_floor : pivot_floor;
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            floor_pivot(d[i]);
            const double fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            const double temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            const double bi = b[i];
            b[i] = b[i + 1];
            b[i + 1] = bi - fact * b[i + 1];
        }
    }
    floor_pivot(d[n - 1]);
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = b[ii];
        if (ii + 1 < n) acc -= du[ii] * x[ii + 1];
        if (ii + 2 < n) acc -= du2[ii] * x[ii + 2];
        x[ii] = acc / d[ii];
    }
    return x;
}

double euclidean_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> tridiagonal_apply(const Tridiagonal& t, const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = t.diag[i] * v[i];
        if (i > 0) acc += t.off[i - 1] * v[i - 1];
        if (i + 1 < n) acc += t.off[i] * v[i + 1];
        out[i] = acc;
    }
    return out;
}

}  // namespace

EigenDecomposition tridiagonal_eigensolve(const BandedOperator& hamiltonian,
                                          std::size_t k_lowest) {
    const Tridiagonal t = extract(hamiltonian);
    const std::size_t n = t.diag.size();
    if (k_lowest == 0 || k_lowest > n) {
        throw DomainError("tridiagonal_eigensolve: k_lowest must lie in [1, n]");
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.off[i - 1]);
        if (i + 1 < n) r += std::abs(t.off[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double norm_bound = std::max(operator_norm_bound(t), 1.0);
    const double eps = std::numeric_limits<double>::epsilon();

    EigenDecomposition out;
    out.eigenvalues.reserve(k_lowest);
    for (std::size_t k = 0; k < k_lowest; ++k) {
        // k-th eigenvalue: smallest lambda with count(lambda) > k.
        double a = lo;
        double b = hi;
        while (b - a > 2.0 * eps * std::max({std::abs(a), std::abs(b), 1.0})) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            if (sturm_count(t, mid) > k) {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.eigenvalues.push_back(0.5 * (a + b));
    }

    const Grid& grid = hamiltonian.grid();
    const double pivot_floor = eps * norm_bound;
    std::vector<std::vector<double>> vectors;
    for (std::size_t k = 0; k < k_lowest; ++k) {
        const double lambda = out.eigenvalues[k];
        std::vector<double> v(n);
        // deterministic start vector
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = 1.0 + 0.1 * std::sin(0.37 * static_cast<double>(i + 1) * (k + 1));
        }
        bool converged = false;
        for (int iter = 0; iter < kMaxInverseIterations; ++iter) {
            v = shifted_solve(t, lambda, std::move(v), pivot_floor);
            // Gram-Schmidt against earlier vectors of nearby eigenvalues
            for (std::size_t j = 0; j < vectors.size(); ++j) {
                if (std::abs(out.eigenvalues[j] - lambda) > 1e-3 * norm_bound) continue;
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += vectors[j][i] * v[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= dot * vectors[j][i];
            }
            const double nv = euclidean_norm(v);
            if (!(nv > 0.0) || !std::isfinite(nv)) break;
            for (double& x : v) x /= nv;
            std::vector<double> r = tridiagonal_apply(t, v);
            for (std::size_t i = 0; i < n; ++i) r[i] -= lambda * v[i];
            if (euclidean_norm(r) <= 1e-9 * norm_bound && iter >= 1) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw ConvergenceError("tridiagonal_eigensolve: inverse iteration did not converge for eigenvalue " +
                                   std::to_string(k));
        }
        vectors.push_back(v);
    }

    out.eigenvectors.reserve(k_lowest);
    for (auto& v : vectors) {
        GridFunction f(grid, std::move(v));
        normalize_in_place(f);
        out.eigenvectors.push_back(std::move(f));
    }
    return out;
}

}  // namespace hsusy
