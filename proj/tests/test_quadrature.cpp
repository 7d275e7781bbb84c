#include <cmath>

#include "doctest.h"
#include "gomopt/errors.hpp"
#include "gomopt/quadrature.hpp"

using namespace gomopt;

TEST_SUITE("quadrature") {

TEST_CASE("polynomials are exact") {
    // K15 integrates polynomials up to degree 22 exactly.
    auto f = [](double x) { return 5 * x * x * x * x - 2 * x * x + 1; };
    CHECK(integrate(f, -1.0, 2.0) == doctest::Approx(33.0 - 6.0 + 3.0).epsilon(1e-13));
}

TEST_CASE("smooth transcendental integrals") {
    CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 50.0) ==
          doctest::Approx(1.0 - std::exp(-50.0)).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("adaptive refinement handles sharp peaks") {
    // Narrow Gaussian needs local subdivision.
    const double s = 1e-3;
    const double got = integrate(
        [=](double x) { return std::exp(-0.5 * x * x / (s * s)); }, -1.0, 1.0);
    CHECK(got == doctest::Approx(s * std::sqrt(2.0 * M_PI)).epsilon(1e-9));
}

TEST_CASE("integrable endpoint singularity") {
    // int_0^1 x^{-1/2} dx = 2; adaptive bisection digs into the endpoint.
    QuadratureSpec spec;
    spec.rel_tol = 1e-8;
    spec.max_subdivisions = 10000;
    const double got =
        integrate([](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0,
                  1.0, spec);
    CHECK(got == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("budget exhaustion raises convergence_error") {
    QuadratureSpec spec;
    spec.rel_tol = 1e-14;
    spec.max_subdivisions = 3;
    CHECK_THROWS_AS(
        integrate([](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0,
                  1.0, spec),
        convergence_error);
}

TEST_CASE("orientation and degenerate interval") {
    CHECK(integrate([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
    CHECK(integrate([](double x) { return x; }, 0.0, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-13));
}

}  // TEST_SUITE
