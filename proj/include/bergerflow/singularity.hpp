#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bergerflow/curvature.hpp"
#include "bergerflow/metric_state.hpp"
#include "bergerflow/soliton.hpp"

namespace bergerflow {

enum class TMethod { LinearInverseRm, LinearB2, None };
enum class TypeVerdict { TypeI, TypeIIIndicated, Undetermined };

std::string method_name(TMethod m);
std::string type_verdict_name(TypeVerdict v);

/// One point of the blow-up history, in physical units. b2_peak is b^2 at
/// the tracked curvature point.
struct SeriesSample {
    double t = 0.0;
    double rm_max = 0.0;
    double b2_peak = 0.0;
};

struct SingularityEstimate {
    bool singular = false;
    double T_est = 0.0;
    /// Half-width of the uncertainty interval around T_est.
    double uncertainty = 0.0;
    TMethod method = TMethod::None;
    TypeVerdict type_verdict = TypeVerdict::Undetermined;
    /// Roots of the two linear fits (NaN when a fit was not possible).
    double T_inverse_rm = 0.0;
    double T_b2 = 0.0;
    /// First sample of the fit window (last decade of rm_max growth).
    std::size_t fit_begin = 0;
    /// (t, (T_est - t) rm_max) for every sample before T_est.
    std::vector<std::pair<double, double>> N_series;
    /// rm_max aligned with N_series.
    std::vector<double> rm_series;
};

/// Extrapolates the singular time from a history. Needs at least 20 samples
/// and overall growth of rm_max by 1e3; otherwise singular = false.
SingularityEstimate estimate_T(const std::vector<SeriesSample>& series);

struct TypeThresholds {
    /// |slope| at or below this is Type I.
    double type_one = 0.1;
    /// Slope at or below this indicates Type II.
    double type_two = -0.3;
    /// Decades of rm_max growth, counted back from the end, used in the fit.
    double decades = 2.0;

    void validate() const;
    bool operator==(const TypeThresholds&) const = default;
};

struct TypeClassification {
    TypeVerdict verdict = TypeVerdict::Undetermined;
    double slope = 0.0;
    std::size_t samples = 0;
    double decades_used = 0.0;
};

/// Slope of log N against log(T_est - t) over the final decades.
TypeClassification classify_type(const SingularityEstimate& est, const TypeThresholds& th = {});

/// A parabolically rescaled neighbourhood of a base node, sigma = sqrt(lambda) (s - s_base).
struct BlowupFrame {
    std::size_t base = 0;
    bool at_origin = false;
    double t_frame = 0.0;
    double lambda = 0.0;
    /// b_s at the base, which is scale invariant.
    double dbdsigma_base = 0.0;
    std::vector<double> sigma;
    std::vector<double> b_tilde;
    std::vector<double> c_tilde;
};

/// Origin frames are based at the innermost node with sigma measured from the
/// origin; other frames at the curvature peak. lambda is the scalar curvature
/// at the base; throws InvalidArgument if it is not positive.
BlowupFrame blowup_frame(const MetricState& state, const CurvatureField& cf, bool at_origin,
                         double sigma_max = 20.0);

struct ProfileDistance {
    double b_distance = 0.0;
    double c_distance = 0.0;
    double distance = 0.0;
    double rotational_defect = 0.0;
    double sigma_cmp = 0.0;
};

/// Weighted sup distance of the frame to an oracle normalized to R = 1 at the
/// base, over sigma in [0, sigma_cmp].
ProfileDistance compare_profile(const BlowupFrame& frame, const Profile& oracle, double sigma_cmp = 5.0);

struct MinimalSphere {
    double x = 0.0;
    double s = 0.0;
    double b = 0.0;
};

/// Sign changes of H, located by linear interpolation in x. Values of c H
/// within 1e-6 of its maximum modulus count as zero.
std::vector<MinimalSphere> detect_minimal_spheres(const MetricState& state, const CurvatureField& cf);

}  // namespace bergerflow
