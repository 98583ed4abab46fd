#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "bergerflow/metric_state.hpp"

namespace bergerflow {

/// Sectional, scalar and mean curvatures of a warped Berger metric.
///
/// k01 = k02 and k03 are the mixed (radial) planes, k12 and k13 = k23 the
/// vertical ones. rm_node is the |Rm| proxy max(|k01|, |k03|, |k12|, |k13|).
struct CurvatureField {
    OrbitDerivatives d;
    std::vector<double> k01;
    std::vector<double> k03;
    std::vector<double> k12;
    std::vector<double> k13;
    std::vector<double> R;
    std::vector<double> H;
    std::vector<double> rm_node;
    double rm_max = 0.0;
    std::size_t rm_argmax = 0;
    /// max 1/b^2, the size of the terms that cancel in flat regions.
    double orbit_scale = 0.0;

    std::size_t size() const noexcept { return R.size(); }
};

/// Evaluates every curvature quantity. Throws NumericalBreakdown on the first
/// non-finite node.
CurvatureField curvature_field(const MetricState& state);

/// Same, reusing already computed s-derivatives.
CurvatureField curvature_field(const MetricState& state, OrbitDerivatives derivs);

struct SignSummary {
    static constexpr std::array<const char*, 4> names{"k01", "k03", "k12", "k13"};
    std::array<std::size_t, 4> negative_count{};
    std::array<double, 4> minimum{};
    std::array<std::size_t, 4> argmin{};
    double tolerance = 0.0;
    bool all_nonnegative = true;
};

/// Per-curvature minima and negative counts; nonnegative when every minimum
/// is >= -(1e-8 rm_max + 64 eps orbit_scale), the second term being a
/// rounding floor for flat regions.
SignSummary curvature_sign_summary(const CurvatureField& cf);

}  // namespace bergerflow
