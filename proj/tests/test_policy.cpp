#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "gomopt/baseline.hpp"
#include "gomopt/hjb.hpp"
#include "gomopt/policy.hpp"

using namespace gomopt;

namespace {
ModelParams headline() {
    return ModelParams(0.01, 0.01, 0.077, 0.67, 0.5, 0.0, 0.0, 0.00019);
}
EfficacyModel headline_g() { return EfficacyModel::isoelastic(0.1, 0.46); }

const PolicyCurve& solved() {
    static const PolicyCurve curve = [] {
        GridSpec grid;
        grid.n_points = 192;
        return solve_u_star(headline(), headline_g(), grid, 1e-9);
    }();
    return curve;
}
}  // namespace

TEST_SUITE("policy") {

TEST_CASE("controls: consumption interpolates u, healthcare from the slope") {
    const auto p = headline();
    const auto g = headline_g();
    const PolicyView view(solved(), p, g);
    // At the nodes the interpolant is exact.
    const auto& curve = solved();
    for (size_t i = 0; i < curve.size(); i += 17) {
        const auto ch = view.controls(curve.m[i]);
        CHECK(ch.c == doctest::Approx(curve.u[i]).epsilon(1e-12));
        CHECK(ch.h == doctest::Approx(curve.h[i]).epsilon(1e-6));
    }
    // Healthcare spending is nondecreasing in the hazard and approaches the
    // saturation level I((1-gamma)/gamma) for very sick households.
    double prev = 0.0;
    for (double m = 1e-4; m < 19.0; m *= 1.5) {
        const auto ch = view.controls(m);
        CHECK(ch.h >= prev - 1e-9);
        prev = ch.h;
    }
    const double k = (1.0 - p.gamma) / p.gamma;
    const double saturation = g.inverse_marginal(k);
    CHECK(view.controls(15.0).h == doctest::Approx(saturation).epsilon(0.05));
}

TEST_CASE("zero efficacy never buys healthcare") {
    const auto p = headline();
    GridSpec grid;
    grid.n_points = 64;
    const auto curve = solve_u_star(p, EfficacyModel::zero(), grid, 1e-8);
    const PolicyView view(curve, p, EfficacyModel::zero());
    for (double m = 1e-4; m < 19.0; m *= 2.0) CHECK(view.controls(m).h == 0.0);
}

TEST_CASE("endogenous mortality: zero efficacy gives pure Gompertz") {
    const auto p = headline();
    GridSpec grid;
    grid.n_points = 64;
    const auto curve = solve_u_star(p, EfficacyModel::zero(), grid, 1e-8);
    const auto prof = endogenous_mortality(p, EfficacyModel::zero(), curve, 0.0,
                                           100.0, 0.0, p.m0, 101);
    REQUIRE(prof.ages.size() == 101);
    for (size_t i = 0; i < prof.ages.size(); ++i) {
        const double exact = p.m0 * std::exp(p.beta * prof.ages[i]);
        CHECK(prof.mortality[i] == doctest::Approx(exact).epsilon(1e-8));
        CHECK(prof.health_rate[i] == 0.0);
        CHECK(prof.health_share[i] == 0.0);
    }
}

TEST_CASE("endogenous mortality under healthcare") {
    const auto p = headline();
    const auto g = headline_g();
    const auto prof =
        endogenous_mortality(p, g, solved(), 0.0, 100.0, 0.0, p.m0, 101);

    // Healthcare slows aging: strictly below the Gompertz extrapolation.
    for (size_t i = 1; i < prof.ages.size(); ++i) {
        CHECK(prof.mortality[i] <
              p.m0 * std::exp(p.beta * prof.ages[i]));
        CHECK(prof.mortality[i] > prof.mortality[i - 1]);  // still aging
    }
    // Late-life hazard log-slope approaches beta - g(I(k)) = beta_g adjusted
    // at the saturated spending level.
    const double k = (1.0 - p.gamma) / p.gamma;
    const double slope_limit = p.beta - g.value(g.inverse_marginal(k));
    const size_t n = prof.ages.size();
    const double slope_obs =
        std::log(prof.mortality[n - 1] / prof.mortality[n - 11]) / 10.0;
    // At age ~100 the hazard is still far from saturation, so only expect the
    // slope to sit between the adjusted and unadjusted growth rates.
    CHECK(slope_obs > slope_limit);
    CHECK(slope_obs < p.beta);

    // The anchor is reproduced exactly.
    CHECK(prof.mortality[0] == doctest::Approx(p.m0).epsilon(1e-12));

    // Health share of total spending rises with age, then flattens.
    CHECK(prof.health_share[40] < prof.health_share[80]);
}

TEST_CASE("anchoring mid-range integrates both directions") {
    const auto p = headline();
    const auto g = headline_g();
    // Anchor at age 50 with the hazard found by the age-0 anchored run.
    const auto fwd = endogenous_mortality(p, g, solved(), 0.0, 100.0, 0.0, p.m0, 101);
    const double m50 = fwd.mortality[50];
    const auto mid =
        endogenous_mortality(p, g, solved(), 0.0, 100.0, 50.0, m50, 101);
    for (size_t i = 0; i < mid.ages.size(); i += 10)
        CHECK(mid.mortality[i] == doctest::Approx(fwd.mortality[i]).epsilon(1e-7));
}

TEST_CASE("anchor outside the curve range throws") {
    const auto p = headline();
    CHECK_THROWS_AS(endogenous_mortality(p, headline_g(), solved(), 0.0, 50.0,
                                         0.0, 1e-9, 51),
                    std::out_of_range);
}

TEST_CASE("portfolio rule and equivalent rate") {
    const ModelParams risky(0.01, 0.01, 0.077, 0.67, 0.5, 0.04, 0.2);
    const auto pp = portfolio_and_equivalent_rate(risky);
    CHECK(pp.pi == doctest::Approx(0.04 / (0.67 * 0.04)).epsilon(1e-14));
    CHECK(pp.r_eq == doctest::Approx(risky.equivalent_safe_rate()).epsilon(1e-14));
    const auto safe = portfolio_and_equivalent_rate(headline());
    CHECK(safe.pi == 0.0);
    CHECK(safe.r_eq == 0.01);
}

TEST_CASE("value function homogeneity and zero-wealth limit") {
    const auto p = headline();
    const auto g = headline_g();
    const double v1 = value_function(1.0, p.m0, solved(), p, g);
    const double v2 = value_function(2.0, p.m0, solved(), p, g);
    CHECK(v2 == doctest::Approx(std::pow(2.0, 1.0 - p.gamma) * v1).epsilon(1e-12));
    CHECK(value_function(0.0, p.m0, solved(), p, g) == 0.0);
    CHECK_THROWS_AS(value_function(-1.0, p.m0, solved(), p, g), std::domain_error);
    // Sicker households are worse off.
    CHECK(value_function(1.0, 0.01, solved(), p, g) <
          value_function(1.0, 0.001, solved(), p, g));
}

TEST_CASE("age profile CSV header") {
    const auto p = headline();
    const auto prof =
        endogenous_mortality(p, headline_g(), solved(), 0.0, 10.0, 0.0, p.m0, 11);
    std::ostringstream os;
    prof.write_csv(os);
    CHECK(os.str().rfind("age,mortality,c,h,share\n", 0) == 0);
}

}  // TEST_SUITE
