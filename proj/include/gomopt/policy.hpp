#pragma once

#include <iosfwd>
#include <vector>

#include "gomopt/hjb.hpp"
#include "gomopt/interp.hpp"
#include "gomopt/params.hpp"

namespace gomopt {

/// Age-indexed economic outputs under the optimal policies.
struct AgeProfile {
    std::vector<double> ages;
    std::vector<double> mortality;
    std::vector<double> consumption_rate;
    std::vector<double> health_rate;
    std::vector<double> health_share;  // h / (c + h)

    /// CSV with header age,mortality,c,h,share.
    void write_csv(std::ostream& os) const;
};

/// Interpolating view over a PolicyCurve: monotone cubic for u (shape
/// preserving), linear for du. No extrapolation; out-of-range m throws.
class PolicyView {
  public:
    PolicyView(const PolicyCurve& curve, const ModelParams& params,
               const EfficacyModel& efficacy);

    double u(double m) const { return u_interp_(m); }
    double du(double m) const;
    /// Optimal (consumption, healthcare) rates at hazard m.
    struct Controls { double c; double h; };
    Controls controls(double m) const;
    double m_min() const { return u_interp_.x_min(); }
    double m_max() const { return u_interp_.x_max(); }
    const ModelParams& params() const { return params_; }
    const EfficacyModel& efficacy() const { return efficacy_; }

  private:
    MonotoneCubic u_interp_;
    std::vector<double> nodes_, du_;
    ModelParams params_;
    EfficacyModel efficacy_;
    double k_;
};

/// Optimal (c, h) at hazard m; thin wrapper over PolicyView for one-shot use.
PolicyView::Controls controls(double m, const PolicyCurve& curve,
                              const ModelParams& params,
                              const EfficacyModel& efficacy);

/// Endogenous mortality and spending by age: integrates
/// dM = (beta - g(h(M))) M dt from the anchor across [t0, t1], sampling at
/// n_out evenly spaced ages. The hazard must stay inside the curve range.
AgeProfile endogenous_mortality(const ModelParams& params,
                                const EfficacyModel& efficacy,
                                const PolicyCurve& curve, double t0, double t1,
                                double anchor_age, double anchor_hazard,
                                int n_out = 0);

struct PortfolioPolicy {
    double pi;    // constant risky fraction mu/(gamma sigma^2)
    double r_eq;  // equivalent safe rate r + mu^2/(2 gamma sigma^2)
};
PortfolioPolicy portfolio_and_equivalent_rate(const ModelParams& params);

/// V(x, m) = x^(1-gamma)/(1-gamma) * u(m)^(-gamma).
double value_function(double x, double m, const PolicyCurve& curve,
                      const ModelParams& params, const EfficacyModel& efficacy);

}  // namespace gomopt
