#include "gomopt/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gomopt {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw std::invalid_argument("MonotoneCubic needs matching arrays, n >= 2");
    for (size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("MonotoneCubic needs strictly increasing x");
    std::vector<double> h(n - 1), s(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        s[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.resize(n);
    d_[0] = s[0];
    d_[n - 1] = s[n - 2];
    for (size_t i = 1; i + 1 < n; ++i) {
        if (s[i - 1] * s[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            // Weighted harmonic mean of adjacent secants.
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
        }
    }
    // Fritsch-Carlson limiter at the ends.
    for (size_t i : {size_t{0}, n - 1}) {
        const double sec = (i == 0) ? s[0] : s[n - 2];
        if (sec == 0.0)
            d_[i] = 0.0;
        else if (d_[i] / sec > 3.0)
            d_[i] = 3.0 * sec;
    }
}

size_t MonotoneCubic::segment(double t) const {
    if (t < x_.front() || t > x_.back())
        throw std::out_of_range("interpolation point outside the tabulated range");
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    size_t i = static_cast<size_t>(it - x_.begin());
    if (i > 0) --i;
    if (i + 1 >= x_.size()) i = x_.size() - 2;
    return i;
}

double MonotoneCubic::operator()(double t) const {
    const size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double u = (t - x_[i]) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    const double h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u);
    const double h11 = u * u * (u - 1);
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

double MonotoneCubic::derivative(double t) const {
    const size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double u = (t - x_[i]) / h;
    const double g00 = 6 * u * u - 6 * u;
    const double g10 = 3 * u * u - 4 * u + 1;
    const double g01 = -g00;
    const double g11 = 3 * u * u - 2 * u;
    return (g00 * y_[i] + g01 * y_[i + 1]) / h + g10 * d_[i] + g11 * d_[i + 1];
}

double lerp_table(const std::vector<double>& x, const std::vector<double>& y,
                  double t) {
    if (t < x.front() || t > x.back())
        throw std::out_of_range("interpolation point outside the tabulated range");
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    size_t i = static_cast<size_t>(it - x.begin());
    if (i > 0) --i;
    if (i + 1 >= x.size()) i = x.size() - 2;
    const double w = (t - x[i]) / (x[i + 1] - x[i]);
    return y[i] + w * (y[i + 1] - y[i]);
}

}  // namespace gomopt
