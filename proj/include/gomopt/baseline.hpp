#pragma once

#include <optional>

#include "gomopt/params.hpp"
#include "gomopt/quadrature.hpp"

namespace gomopt {

/// Optimal consumption-wealth ratio with constant mortality m:
/// c0(m) = (delta + (1-zeta^(1-gamma)) m)/gamma + (1 - 1/gamma) r_eq.
/// Throws validation_error when the deferral condition fails (c0 <= 0).
double c0(double m, const ModelParams& params);

/// Slope of c0 in m, (1-zeta^(1-gamma))/gamma.
double c0_slope(const ModelParams& params);

/// Optimal consumption-wealth ratio with Gompertz aging and no healthcare,
/// evaluated by adaptive quadrature of the integral representation
///   u0(m) = [ (1/b) int_0^inf exp(-(1-zeta^(1-gamma)) m y/(b gamma))
///             (y+1)^(-(1+(delta+(gamma-1) r)/(b gamma))) dy ]^(-1)
/// with b = beta_override.value_or(params.beta).
double u0(double m, const ModelParams& params,
          std::optional<double> beta_override = std::nullopt,
          const QuadratureSpec& quad = {});

/// Same quantity through the upper-incomplete-gamma representation
///   u0(m) = b e^{-z} z^{-p} / Gamma_up(-p, z),
/// z = m (1-zeta^(1-gamma))/(b gamma), p = (delta+(gamma-1) r)/(b gamma).
/// Independent of the quadrature path; serves as its oracle.
double u0_gamma_form(double m, const ModelParams& params,
                     std::optional<double> beta_override = std::nullopt);

/// u0'(m) from the ODE identity u0' = (u0^2 - c0 u0)/(beta m).
/// Returns +infinity at m = 0 (the slope is unbounded there).
double u0_derivative(double m, const ModelParams& params,
                     std::optional<double> beta_override = std::nullopt,
                     const QuadratureSpec& quad = {});

/// Upper incomplete gamma Gamma_up(s, z) = int_z^inf t^(s-1) e^(-t) dt for
/// z > 0 and any real s away from nonpositive integers. Negative s is
/// reached by the descending recurrence
///   Gamma_up(s, z) = (Gamma_up(s+1, z) - z^s e^(-z)) / s
/// started from a positive-argument series/continued-fraction evaluation.
double upper_incomplete_gamma(double s, double z);

}  // namespace gomopt
