#pragma once

#include <functional>

namespace gomopt {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
};

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a,b].
/// Throws convergence_error with the achieved tolerance if the subdivision
/// budget is exhausted before the requested relative tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

}  // namespace gomopt
