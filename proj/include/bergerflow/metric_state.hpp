#pragma once

#include <memory>
#include <span>
#include <vector>

#include "bergerflow/grid.hpp"

namespace bergerflow {

/// Reflection behaviour of a field across x = 0; selects the ghost value.
enum class Parity { Unset, Even, Odd };

inline Parity flip(Parity p) {
    return p == Parity::Odd ? Parity::Even : (p == Parity::Even ? Parity::Odd : Parity::Unset);
}

inline double ghost_sign(Parity p) { return p == Parity::Odd ? -1.0 : 1.0; }

/// Treatment of the inner end of the radial interval.
///  - Origin: the orbit degenerates to a point; b and c odd, xi even.
///  - Mirror: x = 0 is a plane of reflection symmetry; every metric
///    component even. Used for cylinder-type test domains.
enum class InnerBoundary { Origin, Mirror };

/// Values aligned with a Grid plus the parity that fixes its ghost.
struct RadialField {
    std::vector<double> values;
    Parity parity = Parity::Unset;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const noexcept { return values[i]; }
};

/// The flowing metric xi^2 dx^2 + b^2 (s1^2 + s2^2) + c^2 s3^2 sampled on a grid.
struct MetricState {
    double t = 0.0;
    std::vector<double> xi;
    std::vector<double> b;
    std::vector<double> c;
    std::shared_ptr<const Grid> grid;
    InnerBoundary inner = InnerBoundary::Origin;

    std::size_t size() const noexcept { return b.size(); }
    Parity orbit_parity() const noexcept {
        return inner == InnerBoundary::Origin ? Parity::Odd : Parity::Even;
    }
    RadialField b_field() const { return {b, orbit_parity()}; }
    RadialField c_field() const { return {c, orbit_parity()}; }
    RadialField xi_field() const { return {xi, Parity::Even}; }

    /// Throws NumericalBreakdown on non-finite or non-positive entries and
    /// InvalidArgument on length mismatches.
    void validate() const;
};

/// First and second x-derivatives with parity ghosts and a one-sided outer stencil.
void diff_x1(const Grid& grid, std::span<const double> f, Parity parity, std::span<double> out);
void diff_x2(const Grid& grid, std::span<const double> f, Parity parity, std::span<double> out);

/// Derivative along the unit-speed radial geodesic, d/ds = (1/xi) d/dx.
/// Order 2 expands to (f_xx - (xi_x / xi) f_x) / xi^2.
RadialField deriv_s(const RadialField& field, const MetricState& state, int order);

/// The four s-derivatives every curvature and flow formula needs.
struct OrbitDerivatives {
    std::vector<double> bs;
    std::vector<double> bss;
    std::vector<double> cs;
    std::vector<double> css;
};

OrbitDerivatives orbit_derivatives(const MetricState& state);

/// Distance from the origin: trapezoid rule on xi, seeded with xi_0 * x_0 on
/// the first half cell (xi is even, so this is second-order).
RadialField arclength(const MetricState& state);

/// Fourth-order variant of arclength: each cell carries the Euler-Maclaurin
/// correction -h^3 (xi_xx,i + xi_xx,i+1) / 24. Used when regridding in s.
RadialField arclength_corrected(const MetricState& state);

/// Flat R^4 on the given grid: b = c = x, xi = 1.
MetricState flat_state(std::shared_ptr<const Grid> grid);

}  // namespace bergerflow
