#pragma once

// Special-function kernel: log-gamma, the gamma ratio that weights the odd
// oscillator seed, and Kummer's confluent hypergeometric function 1F1.
// All functions are pure and thread-safe.

namespace hsusy::specfun {

struct SpecfunConfig {
    int series_term_cap = 5000;
    double series_rel_tol = 1e-16;
    // Above this argument the 1F1 series is accumulated in log-scaled form.
    double kummer_transform_threshold = 30.0;

    void validate() const;
};

// v = mantissa * e^exponent. Scale shifts go into the exponent only, so a
// value that never needed rescaling keeps its full mantissa precision.
struct SignedLog {
    double mantissa = 1.0;
    double exponent = 0.0;

    int sign() const { return (mantissa > 0.0) - (mantissa < 0.0); }
    double log_abs() const;  // -inf for v = 0
    double value() const;
    // value() * exp(-shift), without forming the unscaled magnitude.
    double scaled(double shift) const;
};

struct LnGamma {
    double value;  // ln|Gamma(x)|
    int sign;      // sign of Gamma(x)
};

/// ln|Gamma(x)| and sign(Gamma(x)), Lanczos (g = 7, 9 terms) with reflection
/// below 1/2. Throws PoleError within 1e-12 of a non-positive integer.
LnGamma ln_gamma(double x);

/// Gamma((3 - 2 eps)/4) / Gamma((1 - 2 eps)/4) for eps <= 1/2.
/// Returns exactly 0 when the denominator sits on a pole (eps = 1/2).
double gamma_ratio(double eps);

/// 1F1(a; b; z). Negative z goes through Kummer's transformation
/// 1F1(a; b; z) = e^z 1F1(b - a; b; -z).
double kummer_1f1(double a, double b, double z, const SpecfunConfig& config = {});
SignedLog kummer_1f1_log(double a, double b, double z, const SpecfunConfig& config = {});

/// d/dz 1F1(a; b; z) = (a / b) 1F1(a + 1; b + 1; z).
double kummer_1f1_dz(double a, double b, double z, const SpecfunConfig& config = {});
SignedLog kummer_1f1_dz_log(double a, double b, double z, const SpecfunConfig& config = {});

// True when x lies within 1e-12 of 0, -1, -2, ...
bool near_nonpositive_integer(double x);

}  // namespace hsusy::specfun
