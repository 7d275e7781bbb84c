#include "gomopt/policy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "gomopt/errors.hpp"

namespace gomopt {

void AgeProfile::write_csv(std::ostream& os) const {
    os.precision(17);
    os << "age,mortality,c,h,share\n";
    for (size_t i = 0; i < ages.size(); ++i)
        os << ages[i] << ',' << mortality[i] << ',' << consumption_rate[i] << ','
           << health_rate[i] << ',' << health_share[i] << '\n';
}

PolicyView::PolicyView(const PolicyCurve& curve, const ModelParams& params,
                       const EfficacyModel& efficacy)
    : u_interp_(curve.m, curve.u), nodes_(curve.m), du_(curve.du),
      params_(params), efficacy_(efficacy),
      k_((1.0 - params.gamma) / params.gamma) {}

double PolicyView::du(double m) const { return lerp_table(nodes_, du_, m); }

PolicyView::Controls PolicyView::controls(double m) const {
    const double c = u_interp_(m);
    if (efficacy_.kind() == EfficacyModel::Kind::Zero) return {c, 0.0};
    const double slope = du(m);
    if (!(slope > 0.0)) return {c, 0.0};
    return {c, efficacy_.inverse_marginal(k_ * c / (m * slope))};
}

PolicyView::Controls controls(double m, const PolicyCurve& curve,
                              const ModelParams& params,
                              const EfficacyModel& efficacy) {
    return PolicyView(curve, params, efficacy).controls(m);
}

AgeProfile endogenous_mortality(const ModelParams& params,
                                const EfficacyModel& efficacy,
                                const PolicyCurve& curve, double t0, double t1,
                                double anchor_age, double anchor_hazard,
                                int n_out) {
    if (!(t1 > t0)) throw std::invalid_argument("age span needs t1 > t0");
    if (n_out <= 1) n_out = static_cast<int>(std::lround(t1 - t0)) + 1;
    const PolicyView view(curve, params, efficacy);
    if (anchor_hazard < view.m_min() || anchor_hazard > view.m_max())
        throw std::out_of_range("anchor hazard outside the solved curve range");

    auto growth = [&](double m) {
        return (params.beta - efficacy.value(view.controls(m).h)) * m;
    };
    // Fixed-step RK4 on a weekly grid; the hazard ODE is smooth and slow.
    auto advance = [&](double m, double from, double to) {
        const double span = to - from;
        const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) * 52)));
        const double dt = span / steps;
        for (int i = 0; i < steps; ++i) {
            const double k1 = growth(m);
            const double k2 = growth(m + 0.5 * dt * k1);
            const double k3 = growth(m + 0.5 * dt * k2);
            const double k4 = growth(m + dt * k3);
            m += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
            if (m < view.m_min() || m > view.m_max())
                throw std::out_of_range(
                    "endogenous mortality left the solved hazard range at age " +
                    std::to_string(from + (i + 1) * dt));
        }
        return m;
    };

    AgeProfile out;
    out.ages.resize(static_cast<size_t>(n_out));
    out.mortality.resize(out.ages.size());
    for (int i = 0; i < n_out; ++i)
        out.ages[static_cast<size_t>(i)] = t0 + (t1 - t0) * i / (n_out - 1);

    // Integrate from the anchor outward in both directions.
    const auto first_after =
        std::lower_bound(out.ages.begin(), out.ages.end(), anchor_age) -
        out.ages.begin();
    double m = anchor_hazard;
    double t = anchor_age;
    for (size_t i = static_cast<size_t>(first_after); i < out.ages.size(); ++i) {
        m = advance(m, t, out.ages[i]);
        t = out.ages[i];
        out.mortality[i] = m;
    }
    m = anchor_hazard;
    t = anchor_age;
    for (size_t i = static_cast<size_t>(first_after); i-- > 0;) {
        m = advance(m, t, out.ages[i]);
        t = out.ages[i];
        out.mortality[i] = m;
    }

    out.consumption_rate.resize(out.ages.size());
    out.health_rate.resize(out.ages.size());
    out.health_share.resize(out.ages.size());
    for (size_t i = 0; i < out.ages.size(); ++i) {
        const auto ch = view.controls(out.mortality[i]);
        out.consumption_rate[i] = ch.c;
        out.health_rate[i] = ch.h;
        out.health_share[i] = ch.h > 0.0 ? ch.h / (ch.c + ch.h) : 0.0;
    }
    return out;
}

PortfolioPolicy portfolio_and_equivalent_rate(const ModelParams& params) {
    if (params.mu != 0.0 && !(params.sigma > 0.0))
        throw std::domain_error("risky demand undefined: sigma = 0 with mu != 0");
    return {params.merton_fraction(), params.equivalent_safe_rate()};
}

double value_function(double x, double m, const PolicyCurve& curve,
                      const ModelParams& params, const EfficacyModel& efficacy) {
    if (x < 0.0) throw std::domain_error("value function needs x >= 0");
    if (x == 0.0) return 0.0;  // power utility at zero wealth, gamma < 1
    const PolicyView view(curve, params, efficacy);
    const double g = params.gamma;
    return std::pow(x, 1.0 - g) / (1.0 - g) * std::pow(view.u(m), -g);
}

}  // namespace gomopt
