#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gomopt/params.hpp"

namespace gomopt {

/// Tabulated solution of the consumption ODE on a hazard grid, with the
/// certified Theorem-style brackets used during the solve.
struct PolicyCurve {
    std::vector<double> m;           // ascending hazard nodes
    std::vector<double> u;           // consumption-wealth ratio per node
    std::vector<double> du;          // slope per node
    std::vector<double> h;           // healthcare rate per node
    std::vector<double> residual;    // ODE residual per node
    std::vector<double> bracket_lo;  // u0 with beta_g in place of beta
    std::vector<double> bracket_hi;  // min(u0, c0 + beta_g)
    double beta_g = 0.0;
    std::vector<double> shoot_widths;  // seed-interval width per bisection step

    size_t size() const { return m.size(); }
    /// CSV with header m,u,du,c,h,residual,bracket_lo,bracket_hi (c == u).
    void write_csv(std::ostream& os) const;
};

/// Healthcare-adjusted mortality growth beta_g = beta - S((1-gamma)/gamma).
double beta_g(const ModelParams& params, const EfficacyModel& efficacy);

/// Exact residual of the consumption ODE at (m, u, u'):
///   u^2 - c0 u + m u' (S((1-gamma)/gamma * u/(m u')) - beta).
/// Throws std::domain_error when du <= 0.
double ode_residual(double m, double u, double du, const ModelParams& params,
                    const EfficacyModel& efficacy);

/// Trial value u lies outside the solution manifold: the slope equation has
/// no admissible root. Used as a shooting rejection signal.
class bracket_breach : public std::runtime_error {
  public:
    enum class Side { Low, High };
    bracket_breach(Side side, double m)
        : std::runtime_error("bracket breach at m = " + std::to_string(m)),
          side(side), m(m) {}
    Side side;
    double m;
};

/// Slope u'(m) consistent with the ODE at (m, u): the smaller nonnegative
/// root s* of phi(s) = (u^2 - c0 u) - beta s + s S((1-gamma)/gamma * u/s),
/// divided by m. This branch deforms continuously to the no-healthcare slope
/// (u^2 - c0 u)/(beta m) as the efficacy vanishes.
double solve_du(double m, double u, const ModelParams& params,
                const EfficacyModel& efficacy);

/// Solve the full-model ODE by double-ended shooting: integrate backward from
/// beyond m_max with asymptotic seed u = c0 + beta_g (1 - theta/m), bisecting
/// theta until the trajectory stays inside the sub/supersolution sandwich
/// down to m_min.
PolicyCurve solve_u_star(const ModelParams& params, const EfficacyModel& efficacy,
                         const GridSpec& grid = {}, double tol = 1e-9);

}  // namespace gomopt
