#pragma once

#include <memory>
#include <span>
#include <vector>

namespace bergerflow {

/// Shape-preserving (Fritsch-Carlson / PCHIP) cubic interpolant. Evaluating
/// outside [front, back] of the abscissae throws InvalidArgument.
class MonotoneInterpolant {
public:
    MonotoneInterpolant(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    std::vector<double> operator()(std::span<const double> xs) const;

    double lower() const noexcept { return lo_; }
    double upper() const noexcept { return hi_; }

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

}  // namespace bergerflow
