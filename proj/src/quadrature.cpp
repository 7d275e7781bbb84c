#include "gomopt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "gomopt/errors.hpp"

namespace gomopt {

namespace {

// Kronrod-15 abscissae (positive half) and weights; odd entries are the
// embedded Gauss-7 nodes.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct Cell {
    double a, b, value, error;
    bool operator<(const Cell& o) const { return error < o.error; }
};

Cell eval_cell(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = kWgk[7] * f(c);
    double resg = kWg[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double fsum = f(c - dx) + f(c + dx);
        resk += kWgk[i] * fsum;
        if (i % 2 == 1) resg += kWg[i / 2] * fsum;
    }
    Cell cell;
    cell.a = a;
    cell.b = b;
    cell.value = resk * h;
    cell.error = std::abs((resk - resg) * h);
    return cell;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
    std::priority_queue<Cell> cells;
    Cell whole = eval_cell(f, a, b);
    double total = whole.value;
    double err = whole.error;
    cells.push(whole);
    int subdivisions = 0;
    while (err > spec.rel_tol * std::max(std::abs(total), 1e-300)) {
        if (subdivisions++ >= spec.max_subdivisions)
            throw convergence_error(
                "quadrature did not converge; achieved relative error " +
                std::to_string(err / std::max(std::abs(total), 1e-300)));
        Cell worst = cells.top();
        cells.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Cell left = eval_cell(f, worst.a, mid);
        Cell right = eval_cell(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        cells.push(left);
        cells.push(right);
    }
    return total;
}

}  // namespace gomopt
