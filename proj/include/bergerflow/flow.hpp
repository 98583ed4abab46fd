#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "bergerflow/curvature.hpp"
#include "bergerflow/metric_state.hpp"

namespace bergerflow {

/// Adaptive time-step limits, in the units of the (possibly rescaled) state.
struct StepControl {
    double cfl_factor = 0.2;
    double curvature_factor = 0.05;
    double dt_min = 1e-12;
    double dt_max = 1e-3;
    int max_retries = 8;

    void validate() const;
    bool operator==(const StepControl&) const = default;
};

/// Time derivatives of (b, c, ln xi) at fixed x. The outermost node is pinned.
struct FlowRhs {
    RadialField db;
    RadialField dc;
    RadialField dlnxi;
};

/// Ricci flow at fixed x: the plain system with no coordinate motion. With an
/// origin inner end the terms are regrouped around b / x and log(c/b) / x^2 so
/// that no 1/x factor multiplies a discretization error of order one.
FlowRhs rhs(const MetricState& state);

/// Radial coordinate velocity v (as in x -> x + v dt) used near the origin.
///
/// Inside a few cells of the origin the fixed-x system lets ln(x xi / b)
/// drift at a rate ~ 4/x^2, which the discrete solution cannot tolerate.
/// The shift v = x w with w' = chi (k01 + k03 - k12 - k13) / x holds that
/// combination fixed where the cutoff chi is 1. chi fades to 0 between
/// gauge_radius and twice that, and v vanishes beyond it.
struct OriginShift {
    std::vector<double> v;
    /// dv/dx, known in closed form from w' (not differenced).
    std::vector<double> v_x;
};

/// Strength of the fourth-difference damping applied to ln xi by the stepper
/// (ln xi has no diffusion of its own, and central differences leave its
/// odd-even mode undamped).
inline constexpr double kGaugeDissipation = 0.05;

double gauge_radius(const Grid& grid);
OriginShift origin_shift(const MetricState& state);

/// A flowing state together with its rescaling history.
///
/// After rescale_continue the state lives in units where the metric has been
/// multiplied by lambda_total and its clock restarted; physical_time() maps back.
struct FlowState {
    MetricState state;
    std::size_t step_count = 0;
    std::size_t rescale_count = 0;
    /// Grid rebuilds without zoom (rescale_continue with zoom == 1).
    std::size_t regrid_count = 0;
    double lambda_total = 1.0;
    double t_offset = 0.0;
    double wall_seconds = 0.0;
    std::vector<double> dt_history;

    double physical_time() const noexcept { return t_offset + state.t / lambda_total; }
};

/// clamp(min(cfl * min (xi dx)^2, eta / rm_max), dt_min, dt_max). Throws
/// ResolutionExhausted when the unclamped value is below dt_min.
double select_dt(const MetricState& state, const CurvatureField& cf, const StepControl& ctl);

/// Smallest cell in arclength, min_i xi_i (x_{i+1} - x_i).
double min_cell(const MetricState& state);

/// One Heun step of fixed size for Ricci flow plus the origin shift. Throws
/// NumericalBreakdown on loss of positivity.
MetricState heun_step(const MetricState& state, double dt);

/// Adaptive step: selects dt, then retries at dt/2 on positivity failure.
FlowState step(FlowState flow, const StepControl& ctl);
FlowState step(FlowState flow, const StepControl& ctl, const CurvatureField& cf);

/// Re-clustering rules applied by rescale_continue.
struct RegridPolicy {
    double nodes_per_unit = 64.0;
    /// Node count of the new grid; 0 keeps the current count.
    std::size_t n_nodes = 0;
    /// Spacing is also capped at b / cells_per_radius. The grid grows past
    /// n_nodes when the cap needs more nodes.
    double cells_per_radius = 4.0;
};

/// Parabolic rescaling g -> zoom * g with a fresh grid in the rescaled
/// arclength (so xi = 1 afterwards). Fields move by monotone cubic
/// interpolation in s; the outermost node keeps its location and values.
FlowState rescale_continue(const FlowState& flow, double zoom, const RegridPolicy& policy = {});

/// Node positions in arclength for a grid ending exactly at s_last, with
/// spacing h_peak + gamma |s - s_peak| and gamma chosen to use n nodes.
std::vector<double> clustered_nodes(std::size_t n, double s_last, double s_peak, double h_peak);

/// As above, with the spacing also bounded by cap(s). The result has more
/// than n nodes when the cap cannot be met with n.
std::vector<double> clustered_nodes(std::size_t n, double s_last, double s_peak, double h_peak,
                                    const std::function<double(double)>& cap);

}  // namespace bergerflow
