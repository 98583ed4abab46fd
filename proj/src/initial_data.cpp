#include "bergerflow/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "bergerflow/curvature.hpp"
#include "bergerflow/errors.hpp"

namespace bergerflow {

std::string_view family_name(Family f) {
    switch (f) {
        case Family::Flat: return "flat";
        case Family::CapCylinder: return "cap_cylinder";
        case Family::TaubNutLike: return "taubnut_like";
        case Family::Neck: return "neck";
        case Family::Cylinder: return "cylinder";
    }
    return "unknown";
}

Family parse_family(std::string_view name) {
    for (Family f : {Family::Flat, Family::CapCylinder, Family::TaubNutLike, Family::Neck,
                     Family::Cylinder}) {
        if (family_name(f) == name) return f;
    }
    throw InvalidArgument("unknown family '" + std::string(name) + "'");
}

std::string_view class_name(InitialClass c) {
    switch (c) {
        case InitialClass::G: return "G";
        case InitialClass::GInf: return "G_inf";
        case InitialClass::Neck: return "neck";
        case InitialClass::Other: return "other";
    }
    return "other";
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

struct Profiles {
    std::function<double(double)> b;
    std::function<double(double)> c;
};

Profiles profiles(Family family, const FamilyParams& p) {
    switch (family) {
        case Family::Flat:
            return {[](double x) { return x; }, [](double x) { return x; }};
        case Family::CapCylinder:
            return {[p](double x) { return p.B * std::tanh(x / p.B); },
                    [p](double x) {
                        const double t = std::tanh(x / p.B);
                        return p.B * t * (1.0 - p.a * t * t);
                    }};
        case Family::TaubNutLike:
            return {[p](double x) { return x * std::pow(1.0 + x * x / (p.ell * p.ell), p.q); },
                    [p](double x) { return p.mu0 * std::tanh(x / p.mu0); }};
        case Family::Neck: {
            auto f = [p](double x) {
                const double u = (x - p.x0) / p.w;
                return x * (1.0 - p.d * std::exp(-u * u));
            };
            return {f, f};
        }
        case Family::Cylinder:
            return {[p](double) { return p.r; }, [p](double) { return p.r; }};
    }
    throw InvalidArgument("unknown family");
}

}  // namespace

void check_family_params(Family family, const FamilyParams& p) {
    switch (family) {
        case Family::Flat:
            return;
        case Family::CapCylinder:
            require(finite_positive(p.B), "cap_cylinder: B must be positive");
            require(p.a >= 0.0 && p.a <= 0.5, "cap_cylinder: a must lie in [0, 0.5]");
            return;
        case Family::TaubNutLike:
            require(finite_positive(p.ell), "taubnut_like: ell must be positive");
            require(p.q >= 0.0 && p.q <= 0.25, "taubnut_like: q must lie in [0, 1/4]");
            require(finite_positive(p.mu0), "taubnut_like: mu0 must be positive");
            return;
        case Family::Neck:
            require(p.d > 0.0 && p.d < 1.0, "neck: d must lie in (0, 1)");
            require(finite_positive(p.x0), "neck: x0 must be positive");
            require(finite_positive(p.w), "neck: w must be positive");
            return;
        case Family::Cylinder:
            require(finite_positive(p.r), "cylinder: r must be positive");
            return;
    }
}

MetricState construct_initial(Family family, const FamilyParams& p, std::shared_ptr<const Grid> grid) {
    if (!grid) throw InvalidArgument("construct_initial: null grid");
    check_family_params(family, p);
    const Profiles f = profiles(family, p);
    MetricState st;
    st.inner = family == Family::Cylinder ? InnerBoundary::Mirror : InnerBoundary::Origin;
    const std::size_t n = grid->size();
    st.b.resize(n);
    st.c.resize(n);
    st.xi.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (*grid)[i];
        st.b[i] = f.b(x);
        st.c[i] = f.c(x);
        if (!finite_positive(st.b[i]) || !finite_positive(st.c[i])) {
            throw InvalidArgument("construct_initial: " + std::string(family_name(family)) +
                                  " parameters give non-positive b or c at x = " + std::to_string(x));
        }
    }
    const double x0 = (*grid)[0];
    const double sign = ghost_sign(st.orbit_parity());
    const double res_b = std::abs(f.b(-x0) - sign * st.b[0]);
    const double res_c = std::abs(f.c(-x0) - sign * st.c[0]);
    if (res_b > 1e-6 || res_c > 1e-6) {
        throw InvalidArgument("construct_initial: closed form violates the parity extension at the origin");
    }
    st.grid = std::move(grid);
    return st;
}

namespace {

// Relative slack for the sign tests on b_s and H; covers the truncation error of the
// derivative stencils on flat tails.
constexpr double kSignSlack = 1e-6;

}  // namespace

ClassValidation validate_class(const MetricState& state) {
    state.validate();
    const CurvatureField cf = curvature_field(state);
    const auto& d = cf.d;
    const Grid& grid = *state.grid;
    const std::size_t n = state.size();
    ClassValidation v;

    if (state.inner == InnerBoundary::Origin) {
        // b_s and c_s are even: extrapolate in x^2 from the two innermost nodes.
        const double x0 = grid[0] * grid[0];
        const double x1 = grid[1] * grid[1];
        const double bs0 = (x1 * d.bs[0] - x0 * d.bs[1]) / (x1 - x0);
        const double cs0 = (x1 * d.cs[0] - x0 * d.cs[1]) / (x1 - x0);
        v.bs_origin_residual = std::abs(bs0 - 1.0);
        v.cs_origin_residual = std::abs(cs0 - 1.0);
        v.smooth_at_origin = v.bs_origin_residual < 1e-4 && v.cs_origin_residual < 1e-4;
    }

    double max_abs_bs = 0.0;
    double max_abs_H = 0.0;
    v.min_bs = d.bs[0];
    v.min_H = cf.H[0];
    v.min_H_x = grid[0];
    v.ratio_floor = state.c[0] / state.b[0];
    v.ratio_ceiling = v.ratio_floor;
    for (std::size_t i = 0; i < n; ++i) {
        v.min_bs = std::min(v.min_bs, d.bs[i]);
        if (cf.H[i] < v.min_H) {
            v.min_H = cf.H[i];
            v.min_H_x = grid[i];
        }
        max_abs_bs = std::max(max_abs_bs, std::abs(d.bs[i]));
        max_abs_H = std::max(max_abs_H, std::abs(cf.H[i]));
        v.sup_b = std::max(v.sup_b, state.b[i]);
        const double ratio = state.c[i] / state.b[i];
        v.ratio_floor = std::min(v.ratio_floor, ratio);
        v.ratio_ceiling = std::max(v.ratio_ceiling, ratio);
    }

    const std::size_t outer_quarter = n - n / 4;
    const std::size_t outer_half = n - n / 2;
    double outer_bs = 0.0;
    double outer_rm = 0.0;
    for (std::size_t i = outer_quarter; i < n; ++i) {
        outer_bs = std::max(outer_bs, d.bs[i]);
        outer_rm = std::max(outer_rm, cf.rm_node[i]);
    }
    v.sup_b_finite = outer_bs <= 1e-2;
    const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * cf.orbit_scale;
    v.curvature_decay_ok = outer_rm <= 1e-2 * cf.rm_max || cf.rm_max <= rounding;
    v.fiber_floor = state.c[outer_half];
    for (std::size_t i = outer_half; i < n; ++i) v.fiber_floor = std::min(v.fiber_floor, state.c[i]);

    const bool no_neck = v.min_H >= -kSignSlack * max_abs_H;
    const bool monotone = v.min_bs >= -kSignSlack * max_abs_bs;
    if (!no_neck) {
        v.verdict = InitialClass::Neck;
    } else if (monotone && v.sup_b_finite) {
        v.verdict = InitialClass::G;
    } else if (monotone && v.curvature_decay_ok && v.fiber_floor > 0.0) {
        v.verdict = InitialClass::GInf;
    } else {
        v.verdict = InitialClass::Other;
    }
    return v;
}

}  // namespace bergerflow
