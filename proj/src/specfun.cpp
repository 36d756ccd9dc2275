#include "hsusy/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hsusy/errors.hpp"

namespace hsusy::specfun {

namespace {

constexpr double kPoleDistance = 1e-12;

// Lanczos coefficients for g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_ln_gamma(double x) {
    // valid for x >= 0.5
    const double xm1 = x - 1.0;
    double sum = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        sum += kLanczos[i] / (xm1 + static_cast<double>(i));
    }
    const double t = xm1 + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t +
           std::log(sum);
}

constexpr double kRescaleAbove = 1e250;
const double kRescaleLog = std::log(kRescaleAbove);

// Taylor series of 1F1 for z >= 0 (or any z with small |z|), Kahan summed.
// When `rescale` is set the partial sums are kept below 1e250 by moving
// powers into a running logarithmic scale.
SignedLog taylor_series(double a, double b, double z, const SpecfunConfig& config,
                        bool rescale) {
    double sum = 1.0;
    double comp = 0.0;
    double term = 1.0;
    double log_scale = 0.0;

    for (int s = 0; s < config.series_term_cap; ++s) {
        const double sd = static_cast<double>(s);
        const double ratio = (a + sd) * z / ((b + sd) * (sd + 1.0));
        term *= ratio;
        if (term == 0.0) return {sum, log_scale};
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        if (rescale && (std::abs(sum) > kRescaleAbove || std::abs(term) > kRescaleAbove)) {
            sum /= kRescaleAbove;
            comp /= kRescaleAbove;
            term /= kRescaleAbove;
            log_scale += kRescaleLog;
        }

        const double next_ratio = std::abs((a + sd + 1.0) * z / ((b + sd + 1.0) * (sd + 2.0)));
        if (next_ratio < 0.5 && std::abs(term) <= config.series_rel_tol * std::abs(sum)) {
            return {sum, log_scale};
        }
    }
    throw ConvergenceError("kummer_1f1: series did not converge within " +
                           std::to_string(config.series_term_cap) + " terms (a=" +
                           std::to_string(a) + ", b=" + std::to_string(b) +
                           ", z=" + std::to_string(z) + ")");
}

}  // namespace

void SpecfunConfig::validate() const {
    if (series_term_cap < 50) {
        throw DomainError("SpecfunConfig: series_term_cap must be >= 50");
    }
    if (!(series_rel_tol > 0.0 && series_rel_tol <= 1e-10)) {
        throw DomainError("SpecfunConfig: series_rel_tol must lie in (0, 1e-10]");
    }
    if (!(kummer_transform_threshold > 0.0)) {
        throw DomainError("SpecfunConfig: kummer_transform_threshold must be positive");
    }
}

double SignedLog::log_abs() const {
    return std::log(std::abs(mantissa)) + exponent;
}

double SignedLog::value() const {
    if (mantissa == 0.0) return 0.0;
    return mantissa * std::exp(exponent);
}

double SignedLog::scaled(double shift) const {
    if (mantissa == 0.0) return 0.0;
    return mantissa * std::exp(exponent - shift);
}

bool near_nonpositive_integer(double x) {
    if (x > kPoleDistance) return false;
    return std::abs(x - std::round(x)) < kPoleDistance;
}

LnGamma ln_gamma(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("ln_gamma: non-finite argument");
    }
    if (near_nonpositive_integer(x)) {
        throw PoleError("ln_gamma: pole at x = " + std::to_string(x));
    }
    if (x >= 0.5) {
        return {lanczos_ln_gamma(x), 1};
    }
    // Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    const double s = std::sin(std::numbers::pi * x);
    return {std::log(std::numbers::pi) - std::log(std::abs(s)) - lanczos_ln_gamma(1.0 - x),
            s > 0 ? 1 : -1};
}

double gamma_ratio(double eps) {
    if (eps > 0.5 + kPoleDistance) {
        throw DomainError("gamma_ratio: factorization energy must be <= 1/2");
    }
    const double num = (3.0 - 2.0 * eps) / 4.0;
    const double den = (1.0 - 2.0 * eps) / 4.0;
    if (near_nonpositive_integer(num)) {
        throw PoleError("gamma_ratio: numerator argument on a pole");
    }
    if (near_nonpositive_integer(den)) {
        return 0.0;
    }
    const LnGamma ln_num = ln_gamma(num);
    const LnGamma ln_den = ln_gamma(den);
    return ln_num.sign * ln_den.sign * std::exp(ln_num.value - ln_den.value);
}

SignedLog kummer_1f1_log(double a, double b, double z, const SpecfunConfig& config) {
    config.validate();
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z)) {
        throw DomainError("kummer_1f1: non-finite argument");
    }
    if (near_nonpositive_integer(b)) {
        throw DomainError("kummer_1f1: b must not be a non-positive integer");
    }
    if (z < 0.0) {
        SignedLog inner = kummer_1f1_log(b - a, b, -z, config);
        inner.exponent += z;
        return inner;
    }
    return taylor_series(a, b, z, config, z > config.kummer_transform_threshold);
}

double kummer_1f1(double a, double b, double z, const SpecfunConfig& config) {
    return kummer_1f1_log(a, b, z, config).value();
}

SignedLog kummer_1f1_dz_log(double a, double b, double z, const SpecfunConfig& config) {
    if (a == 0.0) {
        config.validate();
        if (near_nonpositive_integer(b)) {
            throw DomainError("kummer_1f1_dz: b must not be a non-positive integer");
        }
        return {0.0, 0.0};
    }
    SignedLog shifted = kummer_1f1_log(a + 1.0, b + 1.0, z, config);
    shifted.mantissa *= a / b;
    return shifted;
}

double kummer_1f1_dz(double a, double b, double z, const SpecfunConfig& config) {
    return kummer_1f1_dz_log(a, b, z, config).value();
}

}  // namespace hsusy::specfun
