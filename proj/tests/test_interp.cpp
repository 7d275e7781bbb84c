#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gomopt/interp.hpp"

using namespace gomopt;

TEST_SUITE("interp") {

TEST_CASE("reproduces node values and stays monotone") {
    std::vector<double> x, y;
    for (int i = 0; i <= 20; ++i) {
        x.push_back(0.2 * i);
        y.push_back(std::atan(x.back()));  // increasing, concave
    }
    const MonotoneCubic f(x, y);
    for (size_t i = 0; i < x.size(); ++i)
        CHECK(f(x[i]) == doctest::Approx(y[i]).epsilon(1e-14));
    double prev = f(0.0);
    for (double t = 0.01; t <= 4.0; t += 0.01) {
        const double v = f(t);
        CHECK(v >= prev - 1e-14);
        prev = v;
    }
}

TEST_CASE("accuracy on a smooth function") {
    std::vector<double> x, y;
    for (int i = 0; i <= 60; ++i) {
        x.push_back(i / 60.0 * 3.0);
        y.push_back(std::exp(x.back()));
    }
    const MonotoneCubic f(x, y);
    // Shape preservation costs accuracy near the ends; third order inside.
    for (double t = 0.025; t < 3.0; t += 0.05) {
        CHECK(f(t) == doctest::Approx(std::exp(t)).epsilon(1e-3));
        CHECK(f.derivative(t) == doctest::Approx(std::exp(t)).epsilon(5e-2));
    }
}

TEST_CASE("flat data stays exactly flat") {
    const MonotoneCubic f({0.0, 1.0, 2.0, 3.0}, {2.5, 2.5, 2.5, 2.5});
    for (double t = 0.0; t <= 3.0; t += 0.1)
        CHECK(std::abs(f(t) - 2.5) < 1e-14);
}

TEST_CASE("no overshoot near a plateau") {
    // Classic Fritsch-Carlson motivating data: cubic splines overshoot, the
    // monotone interpolant must not.
    const MonotoneCubic f({0, 1, 2, 3, 4, 5}, {0.0, 0.0, 0.0, 1.0, 1.0, 1.0});
    for (double t = 0.0; t <= 5.0; t += 0.01) {
        CHECK(f(t) >= -1e-14);
        CHECK(f(t) <= 1.0 + 1e-14);
    }
}

TEST_CASE("out-of-range evaluation throws") {
    const MonotoneCubic f({0.0, 1.0, 2.0}, {0.0, 1.0, 4.0});
    CHECK_THROWS_AS(f(-0.1), std::out_of_range);
    CHECK_THROWS_AS(f(2.1), std::out_of_range);
    CHECK(f.x_min() == 0.0);
    CHECK(f.x_max() == 2.0);
}

TEST_CASE("construction rejects bad input") {
    CHECK_THROWS(MonotoneCubic({0.0}, {1.0}));
    CHECK_THROWS(MonotoneCubic({0.0, 0.0, 1.0}, {0.0, 1.0, 2.0}));
    CHECK_THROWS(MonotoneCubic({0.0, 1.0}, {0.0, 1.0, 2.0}));
}

TEST_CASE("linear table lookup") {
    const std::vector<double> x{0.0, 1.0, 3.0};
    const std::vector<double> y{0.0, 2.0, 2.0};
    CHECK(lerp_table(x, y, 0.5) == doctest::Approx(1.0));
    CHECK(lerp_table(x, y, 2.0) == doctest::Approx(2.0));
    CHECK(lerp_table(x, y, 1.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(lerp_table(x, y, -0.5), std::out_of_range);
    CHECK_THROWS_AS(lerp_table(x, y, 3.5), std::out_of_range);
}

}  // TEST_SUITE
