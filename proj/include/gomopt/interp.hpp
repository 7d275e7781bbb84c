#pragma once

#include <vector>

namespace gomopt {

/// Shape-preserving monotone cubic interpolant (Fritsch-Carlson slopes).
/// Keeps interpolated values monotone between monotone data.
class MonotoneCubic {
  public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);

    /// Evaluate at t in [x_front, x_back]; throws std::out_of_range outside.
    double operator()(double t) const;
    /// Derivative of the interpolant.
    double derivative(double t) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

  private:
    size_t segment(double t) const;
    std::vector<double> x_, y_, d_;  // d_: node slopes
};

/// Piecewise-linear interpolation over ascending x; throws std::out_of_range
/// outside the data range.
double lerp_table(const std::vector<double>& x, const std::vector<double>& y,
                  double t);

}  // namespace gomopt
