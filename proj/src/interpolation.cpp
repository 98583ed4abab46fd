#include "bergerflow/interpolation.hpp"

#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <string>

#include "bergerflow/errors.hpp"

namespace bergerflow {

struct MonotoneInterpolant::Impl {
    boost::math::interpolators::pchip<std::vector<double>> spline;
};

MonotoneInterpolant::MonotoneInterpolant(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size() || x.size() < 4) {
        throw InvalidArgument("interpolant needs at least 4 matching abscissae and ordinates");
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) throw InvalidArgument("interpolant abscissae must increase");
    }
    lo_ = x.front();
    hi_ = x.back();
    impl_ = std::make_shared<const Impl>(
        Impl{boost::math::interpolators::pchip<std::vector<double>>(std::move(x), std::move(y))});
}

double MonotoneInterpolant::operator()(double x) const {
    if (!(x >= lo_ && x <= hi_)) {
        throw InvalidArgument("interpolation at " + std::to_string(x) + " would extrapolate beyond [" +
                              std::to_string(lo_) + ", " + std::to_string(hi_) + "]");
    }
    return impl_->spline(x);
}

std::vector<double> MonotoneInterpolant::operator()(std::span<const double> xs) const {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
    return out;
}

}  // namespace bergerflow
