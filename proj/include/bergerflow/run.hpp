#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bergerflow/config.hpp"
#include "bergerflow/initial_data.hpp"
#include "bergerflow/monitor.hpp"
#include "bergerflow/singularity.hpp"

namespace bergerflow {

enum class Termination { TMax, RmGrowth, MaxSteps, MaxRescales, HardFailure, Breakdown };

std::string termination_name(Termination t);

/// Frames and profile distances computed at one snapshot.
struct FrameRecord {
    std::size_t snapshot = 0;
    double t = 0.0;
    double rm_max = 0.0;
    /// Origin frame (NaN fields when the inner end is a mirror or R <= 0 there).
    double origin_lambda = 0.0;
    double origin_dbdsigma = 0.0;
    double bryant_distance = 0.0;
    double rotational_defect = 0.0;
    /// Frame at the curvature peak compared with the unit cylinder.
    double peak_x = 0.0;
    double peak_lambda = 0.0;
    double cylinder_distance = 0.0;
    std::size_t minimal_spheres = 0;
};

/// One accepted step as recorded in the time series (physical units).
struct SeriesRow {
    double t = 0.0;
    double dt = 0.0;
    double R_origin = 0.0;
    double b2_peak = 0.0;
    std::size_t n_minimal = 0;
    MonitorReport report;
};

struct RunResult {
    ClassValidation validation;
    double eps0 = 0.0;
    SingularityEstimate estimate;
    TypeClassification type;
    std::vector<MonotoneVerdict> verdicts;
    bool trusted = true;
    /// First non-hard monitor violation; +inf while trusted.
    double trusted_until = 0.0;
    std::vector<FrameRecord> frames;
    std::vector<SeriesRow> series;
    std::string run_dir;
    std::string config_path;
    std::string timeseries_path;
    std::string result_path;
    std::vector<std::string> snapshot_paths;
    Termination termination = Termination::TMax;
    std::string message;
    /// 0 ok, 2 monitor hard failure, 3 numerical breakdown.
    int exit_code = 0;
    std::size_t steps = 0;
    std::size_t rescales = 0;
    std::size_t regrids = 0;
    double t_final = 0.0;
    double wall_seconds = 0.0;
};

/// Runs a validated configuration, writing config.cfg, timeseries.tsv,
/// snapshots/, frames/ and result.json under config.output.dir. Breakdown
/// and hard monitor failures end the run with the last good state written.
RunResult run(const RunConfig& config);

struct AnalysisResult {
    SingularityEstimate estimate;
    TypeClassification type;
    std::vector<FrameRecord> frames;
    std::string path;
};

/// Recomputes the singular-time estimate from timeseries.tsv and the frames
/// from the snapshots of a finished run; writes analysis.json.
AnalysisResult analyze(const std::string& run_dir);

/// Tracked point for the b^2 law: argmax of b^2 rm over s <= 0.75 s_last.
std::size_t tracked_node(const MetricState& state, const CurvatureField& cf);

/// Frames at one state, with lengths scaled to physical units by lambda_total.
FrameRecord frame_record(const MetricState& state, const CurvatureField& cf, double lambda_total,
                         std::size_t snapshot, double t_physical, const AnalysisConfig& analysis,
                         const std::string& frame_dir = "");

}  // namespace bergerflow
