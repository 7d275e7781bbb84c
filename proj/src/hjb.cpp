#include "gomopt/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gomopt/baseline.hpp"
#include "gomopt/errors.hpp"

namespace gomopt {

void PolicyCurve::write_csv(std::ostream& os) const {
    os.precision(17);
    os << "m,u,du,c,h,residual,bracket_lo,bracket_hi\n";
    for (size_t i = 0; i < m.size(); ++i)
        os << m[i] << ',' << u[i] << ',' << du[i] << ',' << u[i] << ',' << h[i]
           << ',' << residual[i] << ',' << bracket_lo[i] << ',' << bracket_hi[i]
           << '\n';
}

double beta_g(const ModelParams& params, const EfficacyModel& efficacy) {
    if (efficacy.kind() == EfficacyModel::Kind::Zero) return params.beta;
    const double k = (1.0 - params.gamma) / params.gamma;
    return params.beta - efficacy.conjugate(k).value;
}

double ode_residual(double m, double u, double du, const ModelParams& params,
                    const EfficacyModel& efficacy) {
    if (!(m > 0.0) || !(u > 0.0)) throw std::domain_error("ode_residual needs m, u > 0");
    if (!(du > 0.0))
        throw std::domain_error("ode_residual needs du > 0 (elasticity undefined)");
    const double k = (1.0 - params.gamma) / params.gamma;
    double S = 0.0;
    if (efficacy.kind() != EfficacyModel::Kind::Zero)
        S = efficacy.conjugate(k * u / (m * du)).value;
    return u * u - c0(m, params) * u + m * du * (S - params.beta);
}

namespace {

// Slope-equation context for one (m, u) pair.
struct SlopeEq {
    double D;    // u^2 - c0 u
    double ku;   // (1-gamma)/gamma * u
    double beta;
    const EfficacyModel* eff;

    double phi(double s) const {
        if (s <= 0.0) return D;
        return D - beta * s + s * eff->conjugate(ku / s).value;
    }
    // phi'(s) = g(I(ku/s)) - beta, increasing in s.
    double dphi(double s) const {
        return eff->value(eff->inverse_marginal(ku / s)) - beta;
    }
};

}  // namespace

double solve_du(double m, double u, const ModelParams& params,
                const EfficacyModel& efficacy) {
    if (!(m > 0.0) || !(u > 0.0)) throw std::domain_error("solve_du needs m, u > 0");
    const double D = u * u - c0(m, params) * u;
    if (D < 0.0) throw bracket_breach(bracket_breach::Side::Low, m);
    const double k = (1.0 - params.gamma) / params.gamma;

    bool degenerate = efficacy.kind() == EfficacyModel::Kind::Zero;
    if (!degenerate && efficacy.conjugate(k).value < 1e-12) degenerate = true;
    if (degenerate) return D / (params.beta * m);

    // phi(s) = D - beta s + s S(ku/s) is convex: decreasing up to s_min where
    // g(I(ku/s_min)) = beta, increasing after. The admissible branch is the
    // smaller root, in (0, s_min].
    double s_min;
    if (efficacy.kind() == EfficacyModel::Kind::Isoelastic) {
        const double q = efficacy.q();
        const double rho = 1.0 / (1.0 - q);
        const double E = ((1.0 - q) / q) *
                         std::pow(efficacy.a(), rho) *
                         std::pow(k * u, -q * rho);
        s_min = std::pow(params.beta / (E * rho), 1.0 / (rho - 1.0));
    } else {
        SlopeEq eq{D, k * u, params.beta, &efficacy};
        double lo = 1e-30, hi = 1e-30;
        bool found = false;
        for (int i = 0; i < 400 && !found; ++i) {
            hi *= 2.0;
            found = eq.dphi(hi) > 0.0;
        }
        if (!found) {
            s_min = hi;  // g bounded below beta: phi strictly decreasing
        } else {
            for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
                const double mid = 0.5 * (lo + hi);
                (eq.dphi(mid) < 0.0 ? lo : hi) = mid;
            }
            s_min = hi;
        }
    }
    SlopeEq eq{D, k * u, params.beta, &efficacy};
    if (eq.phi(s_min) > 0.0) throw bracket_breach(bracket_breach::Side::High, m);
    if (D == 0.0) return 0.0;
    double lo = 0.0, hi = s_min;
    for (int i = 0; i < 110; ++i) {
        const double mid = 0.5 * (lo + hi);
        (eq.phi(mid) > 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-16 * hi) break;
    }
    return 0.5 * (lo + hi) / m;
}

namespace {

// Cash-Karp embedded 4(5) pair on x = ln m, integrating downward.
struct Stepper {
    const ModelParams& params;
    const EfficacyModel& eff;
    double rel_tol;

    // f(x, u) = m u'(m) with m = e^x.
    double f(double x, double u) const {
        return std::exp(x) * solve_du(std::exp(x), u, params, eff);
    }

    // One accepted adaptive step from (x, u); h < 0. Updates x, u, h.
    void step(double& x, double& u, double& h, double x_floor) const {
        static constexpr double b21 = 1.0 / 5;
        static constexpr double b31 = 3.0 / 40, b32 = 9.0 / 40;
        static constexpr double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
        static constexpr double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27,
                                b54 = 35.0 / 27;
        static constexpr double b61 = 1631.0 / 55296, b62 = 175.0 / 512,
                                b63 = 575.0 / 13824, b64 = 44275.0 / 110592,
                                b65 = 253.0 / 4096;
        static constexpr double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594,
                                c6 = 512.0 / 1771;
        static constexpr double d1 = 2825.0 / 27648, d3 = 18575.0 / 48384,
                                d4 = 13525.0 / 55296, d5 = 277.0 / 14336,
                                d6 = 1.0 / 4;
        for (int attempt = 0; attempt < 60; ++attempt) {
            if (x + h < x_floor) h = x_floor - x;
            const double k1 = f(x, u);
            const double k2 = f(x + b21 * h, u + h * b21 * k1);
            const double k3 = f(x + 3.0 / 10 * h, u + h * (b31 * k1 + b32 * k2));
            const double k4 =
                f(x + 3.0 / 5 * h, u + h * (b41 * k1 + b42 * k2 + b43 * k3));
            const double k5 =
                f(x + h, u + h * (b51 * k1 + b52 * k2 + b53 * k3 + b54 * k4));
            const double k6 = f(x + 7.0 / 8 * h,
                                u + h * (b61 * k1 + b62 * k2 + b63 * k3 +
                                         b64 * k4 + b65 * k5));
            const double u5 = u + h * (c1 * k1 + c3 * k3 + c4 * k4 + c6 * k6);
            const double u4 =
                u + h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);
            const double err = std::abs(u5 - u4) / std::max(std::abs(u), 1e-12);
            if (err <= rel_tol || std::abs(h) < 1e-14) {
                x += h;
                u = u5;
                const double grow =
                    err > 0.0 ? 0.9 * std::pow(rel_tol / err, 0.2) : 5.0;
                h *= std::clamp(grow, 0.2, 5.0);
                return;
            }
            h *= std::max(0.9 * std::pow(rel_tol / err, 0.25), 0.1);
        }
        throw convergence_error("ODE step size underflow in HJB shooting");
    }
};

struct Brackets {
    const ModelParams& params;
    double bg;
    double lo(double m) const { return u0_gamma_form(m, params, bg); }
    double hi(double m) const {
        return std::min(u0_gamma_form(m, params), c0(m, params) + bg);
    }
};

}  // namespace

PolicyCurve solve_u_star(const ModelParams& params, const EfficacyModel& efficacy,
                         const GridSpec& grid, double tol) {
    validate(params, efficacy, Regime::AgingHealth).require();
    const double k = (1.0 - params.gamma) / params.gamma;
    double bg = params.beta;
    bool zero_path = efficacy.kind() == EfficacyModel::Kind::Zero;
    if (!zero_path) {
        const double S = efficacy.conjugate(k).value;
        if (S < 1e-12) {
            zero_path = true;  // avoid cancellation in the healthcare term
        } else {
            bg = params.beta - S;
        }
    }
    const EfficacyModel eff = zero_path ? EfficacyModel::zero() : efficacy;

    const std::vector<double> nodes = grid.nodes();
    const double m_start = std::max(2.5 * grid.m_max, grid.m_max + 30.0);
    const double x_start = std::log(m_start);
    const double x_floor = std::log(grid.m_min);
    const Brackets br{params, bg};
    const Stepper stepper{params, eff, tol / 10.0};

    // The sandwich degenerates to a single curve on the zero-efficacy path
    // (u0g == u0), so containment there is only up to integration accuracy.
    const double slack = zero_path ? 1e-5 : 1e-8;

    auto shoot = [&](double theta, std::vector<double>* u_at_nodes) -> int {
        // Returns 0 on completion, -1 on low breach, +1 on high breach.
        double x = x_start;
        double u = c0(m_start, params) + bg * (1.0 - theta / m_start);
        double h = -1e-3;
        size_t next = nodes.size();  // nodes visited in descending order
        if (u_at_nodes) u_at_nodes->assign(nodes.size(), 0.0);
        try {
            while (x > x_floor + 1e-15) {
                double x_target = x_floor;
                if (next > 0) x_target = std::log(nodes[next - 1]);
                stepper.step(x, u, h, x_target);
                const double m = std::exp(x);
                if (u < br.lo(m) * (1.0 - slack)) return -1;
                if (u > br.hi(m) * (1.0 + slack)) return 1;
                if (next > 0 && x <= std::log(nodes[next - 1]) + 1e-13) {
                    --next;
                    if (u_at_nodes) (*u_at_nodes)[next] = u;
                }
            }
        } catch (const bracket_breach& b) {
            return b.side == bracket_breach::Side::Low ? -1 : 1;
        }
        return next == 0 ? 0 : 1;
    };

    PolicyCurve curve;
    curve.beta_g = bg;
    double theta_lo = 0.0, theta_hi = 16.0;  // seed brackets: high u vs low u
    std::vector<double> u_nodes;
    bool done = false;
    for (int iter = 0; iter < 200 && !done; ++iter) {
        const double theta = 0.5 * (theta_lo + theta_hi);
        curve.shoot_widths.push_back((theta_hi - theta_lo) * bg / m_start);
        const int rc = shoot(theta, &u_nodes);
        if (rc == 0) {
            done = true;
        } else if (rc > 0) {
            theta_lo = theta;  // trajectory too high: lower the seed
        } else {
            theta_hi = theta;
        }
        if (!done && theta_hi - theta_lo < 1e-13)
            throw convergence_error(
                "shooting bracket collapsed without an admissible trajectory; "
                "last interval [" + std::to_string(theta_lo) + ", " +
                std::to_string(theta_hi) + "]");
    }
    if (!done) throw convergence_error("shooting did not converge");

    const size_t n = nodes.size();
    curve.m = nodes;
    curve.u = u_nodes;
    curve.du.resize(n);
    curve.h.resize(n);
    curve.residual.resize(n);
    curve.bracket_lo.resize(n);
    curve.bracket_hi.resize(n);
    for (size_t i = 0; i < n; ++i) {
        curve.du[i] = solve_du(nodes[i], curve.u[i], params, eff);
        curve.residual[i] = curve.du[i] > 0.0
                                ? ode_residual(nodes[i], curve.u[i], curve.du[i],
                                               params, eff)
                                : 0.0;
        curve.h[i] =
            (zero_path || curve.du[i] <= 0.0)
                ? 0.0
                : eff.inverse_marginal(k * curve.u[i] / (nodes[i] * curve.du[i]));
        curve.bracket_lo[i] = br.lo(nodes[i]);
        curve.bracket_hi[i] = br.hi(nodes[i]);
    }
    return curve;
}

}  // namespace gomopt
