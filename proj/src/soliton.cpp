#include "bergerflow/soliton.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <boost/numeric/odeint.hpp>

#include "bergerflow/errors.hpp"
#include "bergerflow/interpolation.hpp"

namespace bergerflow {

std::string profile_kind_name(ProfileKind kind) {
    return kind == ProfileKind::Bryant ? "bryant" : "cylinder";
}

double Profile::phi_at(double s) const {
    if (kind == ProfileKind::Cylinder) {
        if (s < 0.0 || s > sigma_max()) throw InvalidArgument("profile evaluated outside its sigma range");
        return phi.front();
    }
    return MonotoneInterpolant(sigma, phi)(s);
}

namespace {

// phi, w = (1 - phi') / phi^2 and G = f' / phi. In these variables the
// right-hand side and the scalar curvature stay well conditioned at the tip.
using Phase = std::array<double, 3>;

// Tip curvature 72 kappa for phi = sigma - kappa sigma^3 + ...; kappa = 1/72 gives R(0) = 1.
constexpr double kKappa = 1.0 / 72.0;

struct BryantSystem {
    void operator()(const Phase& y, Phase& dy, double /*sigma*/) const {
        const double phi = y[0];
        const double w = y[1];
        const double G = y[2];
        const double p = 1.0 - w * phi * phi;
        dy[0] = p;
        dy[1] = -(G * p + 2.0 * w + 4.0 * w * p) / phi;
        dy[2] = (2.0 * G * p + 6.0 * w * (1.0 + p)) / phi;
    }
};

double scalar_curvature(const Phase& y) {
    const double p = 1.0 - y[1] * y[0] * y[0];
    return -6.0 * y[2] * p - 6.0 * y[1] * (1.0 + p);
}

Profile integrate_bryant(double sigma_max, double tolerance, double spacing) {
    const auto count = static_cast<std::size_t>(std::ceil(sigma_max / spacing - 1e-9));
    std::vector<double> times(count + 1);
    for (std::size_t k = 0; k <= count; ++k) times[k] = std::min(sigma_max, static_cast<double>(k) * spacing);

    Profile out;
    out.kind = ProfileKind::Bryant;
    out.normalization = "scalar curvature R(0) = 1, phi(0) = 0, phi'(0) = 1";
    out.sigma = times;
    out.phi.assign(count + 1, 0.0);
    out.dphi.assign(count + 1, 1.0);
    out.dpotential.assign(count + 1, 0.0);

    const double s0 = std::min(1e-6, 0.1 * spacing);
    Phase y{s0 - kKappa * s0 * s0 * s0, 3.0 * kKappa, -18.0 * kKappa};
    std::vector<double> grid(times.begin() + 1, times.end());
    grid.insert(grid.begin(), s0);
    std::size_t k = 0;
    auto observe = [&](const Phase& st, double) {
        if (k > 0) {
            out.phi[k] = st[0];
            out.dphi[k] = 1.0 - st[1] * st[0] * st[0];
            out.dpotential[k] = st[2] * st[0];
            const double F = out.dpotential[k];
            out.residual = std::max(out.residual, std::abs(scalar_curvature(st) + F * F - 1.0));
        }
        ++k;
    };
    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_dense_output(tolerance, tolerance, odeint::runge_kutta_dopri5<Phase>());
    odeint::integrate_times(stepper, BryantSystem{}, y, grid.begin(), grid.end(), 0.1 * spacing, observe);

    for (std::size_t i = 1; i <= count; ++i) {
        const double p = out.dphi[i];
        if (!std::isfinite(out.phi[i]) || !(p > 0.0) || !(p < 1.0) || !(p < out.dphi[i - 1])) {
            throw Error("Bryant integration left the regular branch at sigma = " + std::to_string(times[i]));
        }
    }
    return out;
}

}  // namespace

Profile bryant_profile(double sigma_max, double tolerance, double spacing) {
    if (!(sigma_max > 0.0) || !(sigma_max <= 1e3)) throw InvalidArgument("bryant_profile: sigma_max must be in (0, 1000]");
    if (!(tolerance >= 1e-10) || !(tolerance < 1.0)) throw InvalidArgument("bryant_profile: tolerance must be in [1e-10, 1)");
    if (!(spacing > 0.0) || spacing > sigma_max) throw InvalidArgument("bryant_profile: bad spacing");

    static std::mutex mutex;
    static std::map<std::tuple<double, double, double>, Profile> cache;
    const auto key = std::make_tuple(sigma_max, tolerance, spacing);
    {
        std::lock_guard<std::mutex> lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    Profile p = integrate_bryant(sigma_max, tolerance, spacing);
    std::lock_guard<std::mutex> lock(mutex);
    return cache.emplace(key, std::move(p)).first->second;
}

Profile cylinder_profile(double radius, double sigma_max, double spacing) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("cylinder_profile: radius must be positive");
    if (!(sigma_max > 0.0) || !std::isfinite(sigma_max)) throw InvalidArgument("cylinder_profile: sigma_max must be positive");
    if (!(spacing > 0.0) || spacing > sigma_max) throw InvalidArgument("cylinder_profile: bad spacing");
    const auto count = static_cast<std::size_t>(std::ceil(sigma_max / spacing - 1e-9));
    Profile out;
    out.kind = ProfileKind::Cylinder;
    out.normalization = "radius " + std::to_string(radius) + ", scalar curvature 6 / radius^2";
    for (std::size_t k = 0; k <= count; ++k) out.sigma.push_back(std::min(sigma_max, static_cast<double>(k) * spacing));
    out.phi.assign(out.sigma.size(), radius);
    out.dphi.assign(out.sigma.size(), 0.0);
    return out;
}

}  // namespace bergerflow
