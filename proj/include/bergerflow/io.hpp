#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "bergerflow/curvature.hpp"
#include "bergerflow/metric_state.hpp"
#include "bergerflow/monitor.hpp"
#include "bergerflow/soliton.hpp"

namespace bergerflow {

inline constexpr int kFormatVersion = 1;

/// Run bookkeeping stored next to each snapshot.
struct SnapshotMeta {
    std::size_t index = 0;
    double t_physical = 0.0;
    std::size_t step = 0;
    double lambda_total = 1.0;
    double dt = 0.0;
    std::size_t rescale_count = 0;
    std::size_t regrid_count = 0;
};

/// A snapshot as read back: the state in its own (rescaled) units, the
/// written diagnostic columns, and the manifest contents.
struct Snapshot {
    MetricState state;
    std::map<std::string, std::vector<double>> columns;
    MonitorReport report;
    SnapshotMeta meta;
};

/// Formats with 17 significant digits.
std::string format_real(double v);

/// Writes snap_NNNN.tsv (x, xi, b, c, s, k01, k03, k12, k13, R, H) and its
/// snap_NNNN.json manifest into dir. Returns the table path.
std::string write_snapshot(const MetricState& state, const CurvatureField& cf, const MonitorReport& report,
                           const SnapshotMeta& meta, const std::string& dir);

/// Throws SchemaError on a version mismatch, a missing column or a truncated table.
Snapshot read_snapshot(const std::string& table_path);

/// A named-column table of reals.
struct Table {
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const;
    bool has(const std::string& name) const;
};

void write_table(const Table& table, const std::string& path);
Table read_table(const std::string& path);

/// Writes sigma, phi, dphi (and the potential slope for Bryant) to path.
void write_profile(const Profile& profile, const std::string& path);

}  // namespace bergerflow
