#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "gomopt/calibrate.hpp"
#include "gomopt/errors.hpp"
#include "gomopt/hjb.hpp"
#include "gomopt/policy.hpp"
#include "gomopt/rng.hpp"

using namespace gomopt;

namespace {

ModelParams headline() {
    return ModelParams(0.01, 0.01, 0.077, 0.67, 0.5, 0.0, 0.0, 0.00019);
}

CohortTable gompertz_cohort(double beta, double m0, double age_lo, double age_hi,
                            double noise_sd, uint64_t seed) {
    CohortTable t;
    Rng rng(seed, 0);
    for (double age = age_lo; age <= age_hi + 1e-9; age += 1.0) {
        t.ages.push_back(age);
        const double noise = noise_sd > 0.0 ? std::exp(noise_sd * rng.normal()) : 1.0;
        t.hazards.push_back(m0 * std::exp(beta * age) * noise);
    }
    return t;
}

std::filesystem::path temp_csv(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream os(path);
    os << body;
    return path;
}

}  // namespace

TEST_SUITE("calibrate") {

TEST_CASE("cohort CSV parsing") {
    const auto good = temp_csv("cohort_good.csv",
                               "age,rate\n30,0.001\n31,0.0011\n# comment\n32,0\n33,0.0013\n");
    const auto t = load_cohort_csv(good.string(), 1900);
    CHECK(t.cohort_year == 1900);
    CHECK(t.size() == 3);          // the zero-hazard row is dropped
    CHECK(t.dropped_rows == 1);
    CHECK(t.ages.front() == 30.0);
    CHECK(t.hazards.back() == doctest::Approx(0.0013));

    CHECK_THROWS_AS(load_cohort_csv("/nonexistent/file.csv"), parse_error);
    const auto bad_header = temp_csv("cohort_h.csv", "years,rate\n30,0.001\n");
    CHECK_THROWS_AS(load_cohort_csv(bad_header.string()), parse_error);
    const auto bad_row = temp_csv("cohort_r.csv", "age,rate\n30,0.001\n31,abc\n");
    CHECK_THROWS_WITH_AS(load_cohort_csv(bad_row.string()),
                         doctest::Contains(":3:"), parse_error);
    const auto bad_order = temp_csv("cohort_o.csv", "age,rate\n31,0.001\n30,0.002\n");
    CHECK_THROWS_AS(load_cohort_csv(bad_order.string()), parse_error);
}

TEST_CASE("cohort CSV round trip") {
    const auto t = gompertz_cohort(0.08, 1e-4, 30, 60, 0.05, 7);
    std::ostringstream os;
    save_cohort_csv(t, os);
    const auto path = temp_csv("cohort_rt.csv", os.str());
    const auto back = load_cohort_csv(path.string());
    REQUIRE(back.size() == t.size());
    for (size_t i = 0; i < t.size(); ++i) {
        CHECK(back.ages[i] == t.ages[i]);
        CHECK(back.hazards[i] == t.hazards[i]);
    }
}

TEST_CASE("Gompertz OLS: exact recovery without noise") {
    const auto t = gompertz_cohort(0.077, 0.00019, 30, 95, 0.0, 0);
    const auto fit = fit_gompertz(t, 0.0);
    CHECK(fit.values.at("beta") == doctest::Approx(0.077).epsilon(1e-10));
    CHECK(fit.values.at("m0") == doctest::Approx(0.00019).epsilon(1e-10));
    CHECK(fit.loss < 1e-20);
    CHECK(fit.converged);
}

TEST_CASE("Gompertz OLS: noisy recovery with sane standard errors") {
    const auto t = gompertz_cohort(0.077, 0.00019, 25, 95, 0.02, 3);
    const auto fit = fit_gompertz(t, 0.0);
    CHECK(fit.values.at("beta") == doctest::Approx(0.077).epsilon(0.01));
    CHECK(fit.values.at("m0") == doctest::Approx(0.00019).epsilon(0.03));
    // The reported standard errors should cover the estimation error.
    CHECK(std::abs(fit.values.at("beta") - 0.077) <
          4.0 * fit.std_errors.at("beta"));
    CHECK(std::abs(fit.values.at("m0") - 0.00019) < 4.0 * fit.std_errors.at("m0"));
}

TEST_CASE("Gompertz OLS input guards") {
    const auto small = gompertz_cohort(0.08, 1e-4, 30, 35, 0.0, 0);
    CHECK_THROWS_AS(fit_gompertz(small), validation_error);
}

TEST_CASE("FitResult serialization is flat key=value") {
    FitResult fit;
    fit.values["beta"] = 0.125;  // exactly representable, prints tersely
    fit.std_errors["beta"] = 0.5;
    fit.loss = 0.25;
    fit.n_evals = 12;
    fit.converged = true;
    std::ostringstream os;
    fit.write(os);
    const auto text = os.str();
    CHECK(text.find("beta=0.125") != std::string::npos);
    CHECK(text.find("stderr_beta=0.5") != std::string::npos);
    CHECK(text.find("loss=0.25") != std::string::npos);
    CHECK(text.find("n_evals=12") != std::string::npos);
    CHECK(text.find("converged=1") != std::string::npos);
}

TEST_CASE("Nelder-Mead on standard objectives") {
    SUBCASE("quadratic bowl") {
        const auto out = nelder_mead(
            [](const std::vector<double>& x) {
                return (x[0] - 3.0) * (x[0] - 3.0) + 2.0 * (x[1] + 1.0) * (x[1] + 1.0);
            },
            {0.0, 0.0}, 0.5, 300, 1e-9);
        CHECK(out.converged);
        CHECK(out.best_x[0] == doctest::Approx(3.0).epsilon(1e-5));
        CHECK(out.best_x[1] == doctest::Approx(-1.0).epsilon(1e-5));
    }
    SUBCASE("Rosenbrock valley") {
        const auto out = nelder_mead(
            [](const std::vector<double>& x) {
                const double a = 1.0 - x[0];
                const double b = x[1] - x[0] * x[0];
                return a * a + 100.0 * b * b;
            },
            {-1.2, 1.0}, 0.5, 2000, 1e-10);
        CHECK(out.best_f < 1e-8);
    }
    SUBCASE("best-so-far trace never increases") {
        const auto out = nelder_mead(
            [](const std::vector<double>& x) { return x[0] * x[0] + x[1] * x[1]; },
            {2.0, 2.0}, 0.7, 100, 1e-9);
        REQUIRE(!out.best_trace.empty());
        for (size_t i = 1; i < out.best_trace.size(); ++i)
            CHECK(out.best_trace[i] <= out.best_trace[i - 1] + 1e-15);
    }
}

TEST_CASE("efficacy fit recovers the generator near the truth") {
    // Generate a noiseless late cohort from the solved model, then refit
    // (a, q) with a modest search budget and a box around the truth.
    const auto p = headline();
    const auto g = EfficacyModel::isoelastic(0.1, 0.46);
    GridSpec grid;
    grid.n_points = 128;
    const auto curve = solve_u_star(p, g, grid, 1e-9);
    const auto prof = endogenous_mortality(p, g, curve, 0.0, 95.0, 0.0, p.m0, 96);
    CohortTable late;
    for (int age = 35; age <= 95; age += 2) {
        late.ages.push_back(age);
        late.hazards.push_back(prof.mortality[static_cast<size_t>(age)]);
    }
    SearchSpec search;
    search.a_min = 0.05;
    search.a_max = 0.2;
    search.q_min = 0.3;
    search.q_max = 0.6;
    search.max_iters = 60;
    search.restarts = 1;
    search.grid_points = 64;
    const auto fit = fit_efficacy(late, p.beta, p.m0, p, search);
    CHECK(fit.values.at("a") == doctest::Approx(0.1).epsilon(0.05));
    CHECK(fit.values.at("q") == doctest::Approx(0.46).epsilon(0.05));
    CHECK(fit.values.at("margin") > 0.0);
    CHECK(fit.n_evals > 0);
}

TEST_CASE("efficacy fit is deterministic given the seed") {
    const auto p = headline();
    const auto g = EfficacyModel::isoelastic(0.1, 0.46);
    GridSpec grid;
    grid.n_points = 96;
    const auto curve = solve_u_star(p, g, grid, 1e-8);
    const auto prof = endogenous_mortality(p, g, curve, 0.0, 90.0, 0.0, p.m0, 91);
    CohortTable late;
    for (int age = 40; age <= 90; age += 5) {
        late.ages.push_back(age);
        late.hazards.push_back(prof.mortality[static_cast<size_t>(age)]);
    }
    SearchSpec search;
    search.max_iters = 25;
    search.restarts = 2;
    search.seed = 99;
    search.grid_points = 64;
    const auto f1 = fit_efficacy(late, p.beta, p.m0, p, search);
    const auto f2 = fit_efficacy(late, p.beta, p.m0, p, search);
    CHECK(f1.values.at("a") == f2.values.at("a"));
    CHECK(f1.values.at("q") == f2.values.at("q"));
    CHECK(f1.loss == f2.loss);
}

TEST_CASE("search box excluding the truth lands on the boundary") {
    const auto p = headline();
    const auto g = EfficacyModel::isoelastic(0.1, 0.46);
    GridSpec grid;
    grid.n_points = 96;
    const auto curve = solve_u_star(p, g, grid, 1e-8);
    const auto prof = endogenous_mortality(p, g, curve, 0.0, 90.0, 0.0, p.m0, 91);
    CohortTable late;
    for (int age = 40; age <= 90; age += 5) {
        late.ages.push_back(age);
        late.hazards.push_back(prof.mortality[static_cast<size_t>(age)]);
    }
    SearchSpec search;
    search.a_min = 0.011;
    search.a_max = 0.03;  // the generator a = 0.1 lies outside
    search.max_iters = 40;
    search.restarts = 1;
    search.grid_points = 64;
    const auto fit = fit_efficacy(late, p.beta, p.m0, p, search);
    CHECK(fit.values.at("on_boundary") == 1.0);
    CHECK_FALSE(fit.converged);
}

}  // TEST_SUITE
