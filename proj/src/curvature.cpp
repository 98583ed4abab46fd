#include "bergerflow/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bergerflow/errors.hpp"

namespace bergerflow {

CurvatureField curvature_field(const MetricState& state) {
    return curvature_field(state, orbit_derivatives(state));
}

CurvatureField curvature_field(const MetricState& state, OrbitDerivatives derivs) {
    const std::size_t n = state.size();
    CurvatureField cf;
    cf.d = std::move(derivs);
    cf.k01.resize(n);
    cf.k03.resize(n);
    cf.k12.resize(n);
    cf.k13.resize(n);
    cf.R.resize(n);
    cf.H.resize(n);
    cf.rm_node.resize(n);
    const auto& d = cf.d;
    for (std::size_t i = 0; i < n; ++i) {
        const double b = state.b[i];
        const double c = state.c[i];
        const double b2 = b * b;
        const double c2 = c * c;
        const double bs_b = d.bs[i] / b;
        const double cs_c = d.cs[i] / c;
        cf.k01[i] = -d.bss[i] / b;
        cf.k03[i] = -d.css[i] / c;
        cf.k12[i] = (4.0 * b2 - 3.0 * c2) / (b2 * b2) - bs_b * bs_b;
        cf.k13[i] = c2 / (b2 * b2) - bs_b * cs_c;
        cf.R[i] = 2.0 * (2.0 * cf.k01[i] + cf.k03[i] + cf.k12[i] + 2.0 * cf.k13[i]);
        cf.H[i] = 2.0 * bs_b + cs_c;
        cf.rm_node[i] = std::max({std::abs(cf.k01[i]), std::abs(cf.k03[i]), std::abs(cf.k12[i]),
                                  std::abs(cf.k13[i])});
        if (!std::isfinite(cf.rm_node[i]) || !std::isfinite(cf.R[i]) || !std::isfinite(cf.H[i])) {
            throw NumericalBreakdown("non-finite curvature", i, (*state.grid)[i]);
        }
        cf.orbit_scale = std::max(cf.orbit_scale, 1.0 / b2);
        if (cf.rm_node[i] > cf.rm_max) {
            cf.rm_max = cf.rm_node[i];
            cf.rm_argmax = i;
        }
    }
    return cf;
}

SignSummary curvature_sign_summary(const CurvatureField& cf) {
    SignSummary s;
    s.tolerance = 1e-8 * cf.rm_max + 64.0 * std::numeric_limits<double>::epsilon() * cf.orbit_scale;
    const std::array<const std::vector<double>*, 4> ks{&cf.k01, &cf.k03, &cf.k12, &cf.k13};
    for (std::size_t q = 0; q < ks.size(); ++q) {
        const auto& k = *ks[q];
        s.minimum[q] = k.empty() ? 0.0 : k[0];
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (k[i] < -s.tolerance) ++s.negative_count[q];
            if (k[i] < s.minimum[q]) {
                s.minimum[q] = k[i];
                s.argmin[q] = i;
            }
        }
        if (s.minimum[q] < -s.tolerance) s.all_nonnegative = false;
    }
    return s;
}

}  // namespace bergerflow
