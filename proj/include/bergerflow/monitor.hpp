#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "bergerflow/curvature.hpp"
#include "bergerflow/initial_data.hpp"
#include "bergerflow/metric_state.hpp"

namespace bergerflow {

/// The controlled functionals at one time slice, in physical units (a state
/// rescaled by lambda_total is mapped back before evaluation). Node indices
/// refer to the grid of the evaluated state.
struct MonitorReport {
    double t = 0.0;
    double ratio_min = 1.0;
    double ratio_max = 1.0;
    std::size_t ratio_min_node = 0;
    std::size_t ratio_max_node = 0;
    double min_bs = 0.0;
    std::size_t min_bs_node = 0;
    double min_H = 0.0;
    std::size_t min_H_node = 0;
    double sup_pos_phi4 = 0.0;
    double sup_symm0 = 0.0;
    double sup_symm1 = 0.0;
    double sup_phi1 = 0.0;
    double sup_b2rm = 0.0;
    double sup_symm2 = 0.0;
    /// min of c_ss c log c over nodes with c < 1; 0 when no such node.
    double min_clogc = 0.0;
    double min_blogb = 0.0;
    double sup_abs_bs = 0.0;
    double sup_abs_cs = 0.0;
    double sup_abs_H = 0.0;
    /// c H is scale invariant and bounded at the origin, unlike H.
    double min_cH = 0.0;
    double sup_abs_cH = 0.0;
    double sup_b = 0.0;
    double cH_origin = 0.0;
    double rm_max = 0.0;
};

/// Field names in serialization order, paired with their values.
std::vector<std::pair<std::string, double>> monitor_fields(const MonitorReport& r);

/// Inverse of monitor_fields; throws SchemaError on a missing name.
MonitorReport monitor_from_fields(const std::vector<std::pair<std::string, double>>& fields);

MonitorReport monitor_report(const MetricState& state, const CurvatureField& cf, double lambda_total = 1.0);

/// Thresholds used by check_monotone. Scales are taken from the history itself.
struct MonitorTolerances {
    /// min_bs >= -sign * max sup_abs_bs and min_cH >= -sign * max sup_abs_cH.
    double sign = 1e-3;
    /// ratio_max <= 1 + ratio_upper.
    double ratio_upper = 1e-10;
    /// ratio_min >= eps0 (1 - ratio_lower).
    double ratio_lower = 1e-3;
    /// sup_b may exceed its initial value by sup_b * this.
    double sup_b = 1e-3;
    /// Allowed growth rate of sup_pos_phi4 relative to its scale, per unit time.
    double phi4_rate = 1e-2;

    void validate() const;
    bool operator==(const MonitorTolerances&) const = default;
};

struct MonotoneVerdict {
    std::string name;
    bool pass = true;
    /// Time of the first violation (NaN when passing).
    double t_fail = 0.0;
    std::string detail;
    /// Ratio violations abort a run; the rest only end the trusted interval.
    bool hard = false;
};

/// Incremental form of check_monotone. Tolerance scales are running maxima,
/// so a verdict at step k depends only on reports up to k.
class MonotoneTracker {
public:
    /// eps0 is the initial min c/b.
    MonotoneTracker(InitialClass cls, double eps0, const MonitorTolerances& tol = {});

    /// Returns the checks that fail for the first time at this report.
    std::vector<MonotoneVerdict> feed(const MonitorReport& report);
    const std::vector<MonotoneVerdict>& verdicts() const noexcept { return verdicts_; }

private:
    void fail(std::size_t k, double t, std::string detail, std::vector<MonotoneVerdict>& fresh);

    InitialClass cls_;
    double eps0_;
    MonitorTolerances tol_;
    std::vector<MonotoneVerdict> verdicts_;
    bool started_ = false;
    MonitorReport prev_;
    double bs_scale_ = 0.0;
    double H_scale_ = 0.0;
    double phi4_scale_ = 0.0;
    double sup_b_floor_ = 0.0;
};

/// Preserved orderings, signs and monotone quantities checked over a history.
/// Classes G and GInf get every check (sup b only for G); other classes only
/// the ratio bounds.
std::vector<MonotoneVerdict> check_monotone(const std::vector<MonitorReport>& history, InitialClass cls,
                                            double eps0, const MonitorTolerances& tol = {});

struct IdentityResidual {
    std::string name;
    double residual = 0.0;
    std::size_t node = 0;
    /// max |time derivative| over the same nodes, for scale.
    double scale = 0.0;
};

/// A short run of consecutive accepted steps on one grid.
struct IdentityWindow {
    std::vector<MetricState> states;
};

/// Compares centred time differences of log(c/b), (c/b) b_s, c H, b_s, c_s,
/// k01 and k03 with their evolution equations evaluated on the middle state.
/// The fixed-node difference is corrected for the origin shift. The inner and
/// outer 10% of nodes are excluded. Throws InvalidArgument for fewer than 3 states or
/// states on different grids.
std::vector<IdentityResidual> verify_evolution_identities(const IdentityWindow& window);

}  // namespace bergerflow
