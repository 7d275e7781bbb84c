#include "gomopt/baseline.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gomopt/errors.hpp"

namespace gomopt {

double c0(double m, const ModelParams& params) {
    if (m < 0.0) throw std::domain_error("c0 needs m >= 0");
    const double req = params.equivalent_safe_rate();
    const double value = (params.delta + params.zeta_factor() * m) / params.gamma +
                         (1.0 - 1.0 / params.gamma) * req;
    if (!(value > 0.0))
        throw validation_error(
            "ill-posed: delta + (1-zeta^(1-gamma)) m - (1-gamma) r <= 0 at m = " +
            std::to_string(m));
    return value;
}

double c0_slope(const ModelParams& params) {
    return params.zeta_factor() / params.gamma;
}

namespace {

struct U0Coeffs {
    double b;  // mortality growth rate in use (beta or beta_g)
    double A;  // (1-zeta^(1-gamma)) / (b gamma); exponent scale per unit m
    double p;  // (delta + (gamma-1) r) / (b gamma)
};

U0Coeffs u0_coeffs(const ModelParams& params, std::optional<double> beta_override) {
    const double b = beta_override.value_or(params.beta);
    if (!(b > 0.0)) throw validation_error("u0 needs a positive mortality growth rate");
    const double zf = params.zeta_factor();
    const double p =
        (params.delta + (params.gamma - 1.0) * params.equivalent_safe_rate()) /
        (b * params.gamma);
    if (!(p > 0.0))
        throw validation_error("ill-posed: delta + (gamma-1) r <= 0 (aging regime)");
    if (!(zf > 0.0) || !std::isfinite(zf))
        throw validation_error("aging regime needs 1 - zeta^(1-gamma) > 0");
    return {b, zf / (b * params.gamma), p};
}

}  // namespace

double u0(double m, const ModelParams& params, std::optional<double> beta_override,
          const QuadratureSpec& quad) {
    if (m < 0.0) throw std::domain_error("u0 needs m >= 0");
    const U0Coeffs k = u0_coeffs(params, beta_override);
    if (m == 0.0) return k.b * k.p;  // integral equals 1/p exactly
    // Substitution y = t/(1-t) maps the integral to (0,1):
    //   int_0^1 exp(-A m t/(1-t)) (1-t)^(p-1) dt
    const double am = k.A * m;
    const double p = k.p;
    auto f = [am, p](double t) {
        const double omt = 1.0 - t;
        if (omt <= 0.0) return 0.0;
        return std::exp(-am * t / omt + (p - 1.0) * std::log(omt));
    };
    const double integral = integrate(f, 0.0, 1.0, quad);
    return k.b / integral;
}

double u0_gamma_form(double m, const ModelParams& params,
                     std::optional<double> beta_override) {
    if (m < 0.0) throw std::domain_error("u0_gamma_form needs m >= 0");
    const U0Coeffs k = u0_coeffs(params, beta_override);
    if (m == 0.0) return k.b * k.p;  // the zero-mortality limit cbar
    const double z = k.A * m;
    const double gup = upper_incomplete_gamma(-k.p, z);
    if (!(gup > 0.0) || !std::isfinite(gup))
        throw convergence_error(
            "incomplete gamma evaluation failed; fall back to the u0 quadrature");
    return k.b * std::exp(-z - k.p * std::log(z)) / gup;
}

double u0_derivative(double m, const ModelParams& params,
                     std::optional<double> beta_override, const QuadratureSpec& quad) {
    if (m < 0.0) throw std::domain_error("u0_derivative needs m >= 0");
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    const double b = beta_override.value_or(params.beta);
    const double u = u0(m, params, beta_override, quad);
    return (u * u - c0(m, params) * u) / (b * m);
}

namespace {

// Series for the lower incomplete gamma, good for z < s + 1.
double gamma_lower_series(double s, double z) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= z / (s + n);
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::exp(s * std::log(z) - z) * sum;
}

// Modified Lentz continued fraction for the upper incomplete gamma, s > 0,
// z >= s + 1.
double gamma_upper_cf(double s, double z) {
    const double tiny = 1e-300;
    double b = z + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(s * std::log(z) - z) * h;
}

}  // namespace

double upper_incomplete_gamma(double s, double z) {
    if (!(z > 0.0)) throw std::domain_error("upper incomplete gamma needs z > 0");
    int steps = 0;
    double s0 = s;
    while (s0 <= 0.0) {
        s0 += 1.0;
        ++steps;
    }
    if (s0 < 1e-12)
        throw convergence_error(
            "upper incomplete gamma near a nonpositive integer first argument");
    double g = (z < s0 + 1.0) ? std::tgamma(s0) - gamma_lower_series(s0, z)
                              : gamma_upper_cf(s0, z);
    for (int j = 0; j < steps; ++j) {
        s0 -= 1.0;
        g = (g - std::exp(s0 * std::log(z) - z)) / s0;
    }
    return g;
}

}  // namespace gomopt
