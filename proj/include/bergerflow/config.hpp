#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "bergerflow/flow.hpp"
#include "bergerflow/initial_data.hpp"
#include "bergerflow/monitor.hpp"
#include "bergerflow/singularity.hpp"

namespace bergerflow {

struct GridConfig {
    std::size_t n_nodes = 2048;
    double x_max = 20.0;
    double cluster_factor = 1.0;

    bool operator==(const GridConfig&) const = default;
};

struct RunControl {
    /// Physical end time.
    double t_max = 1.0;
    /// Stop once rm_max has grown by this factor over its initial value (0 disables).
    double stop_rm_growth = 0.0;
    std::size_t max_rescales = 40;
    double rescale_trigger = 4.0;
    double nodes_per_unit = 64.0;
    double cells_per_radius = 4.0;
    /// Hard cap on accepted steps (0 disables).
    std::size_t max_steps = 0;

    bool operator==(const RunControl&) const = default;
};

struct SnapshotConfig {
    /// A snapshot whenever rm_max grows by another 10^decade_step.
    double decade_step = 1.0;
    /// And every dt of physical time (0 disables).
    double every_dt = 0.0;

    bool operator==(const SnapshotConfig&) const = default;
};

struct OutputConfig {
    std::string dir = "run";
    /// Time-series rows are written for every series_stride-th accepted step.
    std::size_t series_stride = 1;

    bool operator==(const OutputConfig&) const = default;
};

struct AnalysisConfig {
    double sigma_max = 20.0;
    double sigma_cmp = 5.0;
    TypeThresholds type;

    bool operator==(const AnalysisConfig&) const = default;
};

struct RunConfig {
    Family family = Family::CapCylinder;
    FamilyParams params;
    GridConfig grid;
    StepControl step;
    RunControl run;
    SnapshotConfig snapshots;
    MonitorTolerances monitor;
    OutputConfig output;
    AnalysisConfig analysis;
    std::uint64_t seed = 0;

    bool operator==(const RunConfig&) const = default;
};

/// Parses the key = value grammar. Sections ([initial], [grid], [step], [run],
/// [snapshots], [monitor], [output], [analysis]) are optional; a key given
/// inside a section must belong to it. Throws ConfigError naming the key and line.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::string& path);

/// Writes every field, defaults included, so that parse_config reproduces it.
std::string serialize_config(const RunConfig& config);

/// Range checks across the whole configuration. Throws ConfigError.
void validate_config(const RunConfig& config);

}  // namespace bergerflow
