#include "bergerflow/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <tuple>

#include <json.hpp>

#include "bergerflow/errors.hpp"
#include "bergerflow/flow.hpp"
#include "bergerflow/io.hpp"
#include "bergerflow/soliton.hpp"

namespace bergerflow {

namespace fs = std::filesystem;

std::string termination_name(Termination t) {
    switch (t) {
        case Termination::TMax:
            return "t_max";
        case Termination::RmGrowth:
            return "rm_growth";
        case Termination::MaxSteps:
            return "max_steps";
        case Termination::MaxRescales:
            return "resolution_exhausted";
        case Termination::HardFailure:
            return "monitor_hard_failure";
        case Termination::Breakdown:
            return "numerical_breakdown";
    }
    return "unknown";
}

std::size_t tracked_node(const MetricState& state, const CurvatureField& cf) {
    const RadialField s = arclength(state);
    const double s_cut = 0.75 * s.values.back();
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t i = 0; i < state.size() && s[i] <= s_cut; ++i) {
        const double v = state.b[i] * state.b[i] * cf.rm_node[i];
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    return best;
}

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_frame(const BlowupFrame& fr, const std::string& path) {
    Table t;
    t.names = {"sigma", "b_tilde", "c_tilde"};
    for (std::size_t i = 0; i < fr.sigma.size(); ++i) t.rows.push_back({fr.sigma[i], fr.b_tilde[i], fr.c_tilde[i]});
    write_table(t, path);
}

nlohmann::ordered_json frame_json(const FrameRecord& f) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
    nlohmann::ordered_json j;
    j["snapshot"] = f.snapshot;
    j["t"] = num(f.t);
    j["rm_max"] = num(f.rm_max);
    j["origin_lambda"] = num(f.origin_lambda);
    j["origin_dbdsigma"] = num(f.origin_dbdsigma);
    j["bryant_distance"] = num(f.bryant_distance);
    j["rotational_defect"] = num(f.rotational_defect);
    j["peak_x"] = num(f.peak_x);
    j["peak_lambda"] = num(f.peak_lambda);
    j["cylinder_distance"] = num(f.cylinder_distance);
    j["minimal_spheres"] = f.minimal_spheres;
    return j;
}

nlohmann::ordered_json estimate_json(const SingularityEstimate& e, const TypeClassification& tc) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(); };
    nlohmann::ordered_json j;
    j["singular"] = e.singular;
    j["T_est"] = num(e.T_est);
    j["uncertainty"] = num(e.uncertainty);
    j["method"] = method_name(e.method);
    j["T_inverse_rm"] = num(e.T_inverse_rm);
    j["T_b2"] = num(e.T_b2);
    j["type_verdict"] = type_verdict_name(tc.verdict);
    j["type_slope"] = num(tc.slope);
    j["type_decades"] = num(tc.decades_used);
    return j;
}

Table series_table(const std::vector<SeriesRow>& rows, const SingularityEstimate& est) {
    Table t;
    t.names = {"t",        "dt",           "rm_max",    "R_origin",  "min_H",     "min_bs",
               "ratio_min", "ratio_max",   "sup_b2rm",  "sup_pos_phi4", "sup_b",  "sup_symm0",
               "sup_symm1", "sup_symm2",   "sup_abs_H", "sup_abs_bs", "min_cH",  "sup_abs_cH",
               "b2_peak",   "n_minimal"};
    if (est.singular) t.names.push_back("N");
    for (const auto& r : rows) {
        const auto& m = r.report;
        std::vector<double> row{r.t,           r.dt,        m.rm_max,       r.R_origin,  m.min_H,     m.min_bs,
                                m.ratio_min,   m.ratio_max, m.sup_b2rm,     m.sup_pos_phi4, m.sup_b, m.sup_symm0,
                                m.sup_symm1,   m.sup_symm2, m.sup_abs_H,    m.sup_abs_bs, m.min_cH, m.sup_abs_cH, r.b2_peak,
                                static_cast<double>(r.n_minimal)};
        if (est.singular) row.push_back((est.T_est - r.t) * m.rm_max);
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::pair<SingularityEstimate, TypeClassification> estimate_from(const std::vector<SeriesSample>& samples,
                                                                 const AnalysisConfig& analysis) {
    SingularityEstimate est = estimate_T(samples);
    TypeClassification tc;
    if (est.singular) {
        tc = classify_type(est, analysis.type);
        est.type_verdict = tc.verdict;
    }
    return {est, tc};
}

}  // namespace

FrameRecord frame_record(const MetricState& state, const CurvatureField& cf, double lambda_total,
                         std::size_t snapshot, double t_physical, const AnalysisConfig& analysis,
                         const std::string& frame_dir) {
    FrameRecord rec;
    rec.snapshot = snapshot;
    rec.t = t_physical;
    rec.rm_max = cf.rm_max * lambda_total;
    rec.minimal_spheres = detect_minimal_spheres(state, cf).size();
    rec.origin_lambda = rec.origin_dbdsigma = rec.bryant_distance = rec.rotational_defect = kNaN;
    rec.peak_x = rec.peak_lambda = rec.cylinder_distance = kNaN;
    char name[48];
    if (state.inner == InnerBoundary::Origin && cf.R[0] > 0.0) {
        const BlowupFrame fr = blowup_frame(state, cf, true, analysis.sigma_max);
        rec.origin_lambda = fr.lambda * lambda_total;
        rec.origin_dbdsigma = fr.dbdsigma_base;
        if (!fr.sigma.empty() && fr.sigma.back() >= analysis.sigma_cmp) {
            const ProfileDistance d =
                compare_profile(fr, bryant_profile(analysis.sigma_max), analysis.sigma_cmp);
            rec.bryant_distance = d.distance;
            rec.rotational_defect = d.rotational_defect;
        }
        if (!frame_dir.empty()) {
            std::snprintf(name, sizeof name, "frame_%04zu_origin.tsv", snapshot);
            write_frame(fr, (fs::path(frame_dir) / name).string());
        }
    }
    if (cf.R[cf.rm_argmax] > 0.0) {
        const BlowupFrame fr = blowup_frame(state, cf, false, analysis.sigma_max);
        rec.peak_x = (*state.grid)[fr.base] / std::sqrt(lambda_total);
        rec.peak_lambda = fr.lambda * lambda_total;
        if (!fr.sigma.empty() && fr.sigma.back() >= analysis.sigma_cmp) {
            const ProfileDistance d =
                compare_profile(fr, cylinder_profile(std::sqrt(6.0), analysis.sigma_max), analysis.sigma_cmp);
            rec.cylinder_distance = d.distance;
        }
        if (!frame_dir.empty()) {
            std::snprintf(name, sizeof name, "frame_%04zu_peak.tsv", snapshot);
            write_frame(fr, (fs::path(frame_dir) / name).string());
        }
    }
    return rec;
}

RunResult run(const RunConfig& config) {
    validate_config(config);
    RunResult res;
    res.run_dir = config.output.dir;
    const fs::path dir(config.output.dir);
    const fs::path snap_dir = dir / "snapshots";
    const fs::path frame_dir = dir / "frames";
    fs::create_directories(snap_dir);
    fs::create_directories(frame_dir);
    res.config_path = (dir / "config.cfg").string();
    {
        std::ofstream out(res.config_path, std::ios::binary);
        out << serialize_config(config);
    }

    auto grid = std::make_shared<const Grid>(
        build_grid(config.grid.n_nodes, config.grid.x_max, config.grid.cluster_factor));
    FlowState flow;
    flow.state = construct_initial(config.family, config.params, grid);
    res.validation = validate_class(flow.state);
    res.eps0 = res.validation.ratio_floor;
    MonotoneTracker tracker(res.validation.verdict, res.eps0, config.monitor);
    res.trusted_until = std::numeric_limits<double>::infinity();

    const RegridPolicy policy{config.run.nodes_per_unit, 0, config.run.cells_per_radius};
    const double rm0 = curvature_field(flow.state).rm_max;
    double rm_at_rescale = rm0;
    double cell_ref = min_cell(flow.state);
    const double decade_factor = std::pow(10.0, config.snapshots.decade_step);
    double next_decade = rm0 > 0.0 ? rm0 * decade_factor : std::numeric_limits<double>::infinity();
    double next_dt_snap = config.snapshots.every_dt > 0.0 ? config.snapshots.every_dt
                                                          : std::numeric_limits<double>::infinity();
    std::size_t snap_index = 0;
    std::size_t last_snap_step = std::numeric_limits<std::size_t>::max();
    const auto wall_start = std::chrono::steady_clock::now();

    auto take_snapshot = [&](const CurvatureField& cf, const MonitorReport& report) {
        SnapshotMeta meta{snap_index, flow.physical_time(), flow.step_count, flow.lambda_total,
                          flow.dt_history.empty() ? 0.0 : flow.dt_history.back(), flow.rescale_count,
                          flow.regrid_count};
        res.snapshot_paths.push_back(write_snapshot(flow.state, cf, report, meta, snap_dir.string()));
        res.frames.push_back(frame_record(flow.state, cf, flow.lambda_total, snap_index, flow.physical_time(),
                                          config.analysis, frame_dir.string()));
        last_snap_step = flow.step_count;
        ++snap_index;
    };
    auto record = [&](const CurvatureField& cf, const MonitorReport& report) {
        SeriesRow row;
        row.t = report.t;
        row.dt = flow.dt_history.empty() ? 0.0 : flow.dt_history.back() / flow.lambda_total;
        row.R_origin = cf.R[0] * flow.lambda_total;
        const std::size_t k = tracked_node(flow.state, cf);
        row.b2_peak = flow.state.b[k] * flow.state.b[k] / flow.lambda_total;
        row.n_minimal = detect_minimal_spheres(flow.state, cf).size();
        row.report = report;
        res.series.push_back(row);
    };
    auto finish = [&](Termination why, std::string message, int code) {
        res.termination = why;
        res.message = std::move(message);
        res.exit_code = code;
    };

    CurvatureField cf = curvature_field(flow.state);
    std::size_t last_recorded = std::numeric_limits<std::size_t>::max();
    std::size_t last_fed = std::numeric_limits<std::size_t>::max();
    while (true) {
        MonitorReport report = monitor_report(flow.state, cf, flow.lambda_total);
        report.t = flow.physical_time();
        bool hard = false;
        // A regrid does not advance the step; its state is checked after the next step.
        const bool fresh_step = last_fed != flow.step_count;
        last_fed = flow.step_count;
        for (const auto& v : fresh_step ? tracker.feed(report) : std::vector<MonotoneVerdict>{}) {
            if (v.hard) {
                hard = true;
                res.message = v.name + ": " + v.detail;
            } else if (res.trusted) {
                res.trusted = false;
                res.trusted_until = v.t_fail;
            }
        }
        if (fresh_step && flow.step_count % config.output.series_stride == 0) {
            record(cf, report);
            last_recorded = flow.step_count;
        }
        const double rm_phys = cf.rm_max * flow.lambda_total;
        bool snap = flow.step_count == 0;
        while (rm_phys >= next_decade) {
            snap = true;
            next_decade *= decade_factor;
        }
        while (report.t >= next_dt_snap) {
            snap = true;
            next_dt_snap += config.snapshots.every_dt;
        }

        bool done = true;
        if (hard) {
            finish(Termination::HardFailure, res.message, 2);
        } else if (report.t >= config.run.t_max * (1.0 - 1e-12)) {
            finish(Termination::TMax, "reached t_max", 0);
        } else if (config.run.stop_rm_growth > 0.0 && rm_phys >= config.run.stop_rm_growth * rm0) {
            finish(Termination::RmGrowth, "rm_max grew by the requested factor", 0);
        } else if (config.run.max_steps > 0 && flow.step_count >= config.run.max_steps) {
            finish(Termination::MaxSteps, "reached max_steps", 0);
        } else {
            done = false;
        }
        if (snap || done) {
            if (last_snap_step != flow.step_count) take_snapshot(cf, report);
        }
        if (done) {
            if (last_recorded != flow.step_count) record(cf, report);
            break;
        }

        try {
            bool exhausted = false;
            if (cf.rm_max > config.run.rescale_trigger * rm_at_rescale) {
                exhausted = true;
            } else if (min_cell(flow.state) < 0.5 * cell_ref) {
                flow = rescale_continue(flow, 1.0, policy);
                cell_ref = min_cell(flow.state);
                cf = curvature_field(flow.state);
                continue;
            } else {
                try {
                    StepControl ctl = config.step;
                    ctl.dt_max = std::min(ctl.dt_max, (config.run.t_max - report.t) * flow.lambda_total);
                    flow = step(std::move(flow), ctl, cf);
                } catch (const ResolutionExhausted&) {
                    exhausted = true;
                }
            }
            if (exhausted) {
                if (flow.rescale_count >= config.run.max_rescales) {
                    if (last_snap_step != flow.step_count) take_snapshot(cf, report);
                    if (last_recorded != flow.step_count) record(cf, report);
                    finish(Termination::MaxRescales, "resolution exhausted after the maximum number of rescales", 0);
                    break;
                }
                flow = rescale_continue(flow, config.run.rescale_trigger, policy);
                cell_ref = min_cell(flow.state);
                cf = curvature_field(flow.state);
                rm_at_rescale = cf.rm_max;
                continue;
            }
            cf = curvature_field(flow.state);
        } catch (const NumericalBreakdown& e) {
            if (last_snap_step != flow.step_count) {
                take_snapshot(curvature_field(flow.state), report);
            }
            if (last_recorded != flow.step_count) record(cf, report);
            finish(Termination::Breakdown, e.what(), 3);
            break;
        }
    }

    res.steps = flow.step_count;
    res.rescales = flow.rescale_count;
    res.regrids = flow.regrid_count;
    res.t_final = flow.physical_time();
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    res.verdicts = tracker.verdicts();

    std::vector<SeriesSample> samples;
    for (const auto& r : res.series) samples.push_back({r.t, r.report.rm_max, r.b2_peak});
    std::tie(res.estimate, res.type) = estimate_from(samples, config.analysis);

    res.timeseries_path = (dir / "timeseries.tsv").string();
    write_table(series_table(res.series, res.estimate), res.timeseries_path);

    nlohmann::ordered_json j;
    j["format_version"] = kFormatVersion;
    j["termination"] = termination_name(res.termination);
    j["message"] = res.message;
    j["exit_code"] = res.exit_code;
    j["class"] = std::string(class_name(res.validation.verdict));
    j["eps0"] = res.eps0;
    j["steps"] = res.steps;
    j["rescales"] = res.rescales;
    j["regrids"] = res.regrids;
    j["t_final"] = res.t_final;
    j["wall_seconds"] = res.wall_seconds;
    j["trusted"] = res.trusted;
    j["trusted_until"] = res.trusted ? nlohmann::ordered_json() : nlohmann::ordered_json(res.trusted_until);
    j["estimate"] = estimate_json(res.estimate, res.type);
    auto& verdicts = j["monitor"];
    verdicts = nlohmann::ordered_json::array();
    for (const auto& v : res.verdicts) {
        verdicts.push_back({{"name", v.name},
                            {"pass", v.pass},
                            {"hard", v.hard},
                            {"t_fail", v.pass ? nlohmann::ordered_json() : nlohmann::ordered_json(v.t_fail)},
                            {"detail", v.detail}});
    }
    auto& frames = j["frames"];
    frames = nlohmann::ordered_json::array();
    for (const auto& f : res.frames) frames.push_back(frame_json(f));
    j["timeseries"] = "timeseries.tsv";
    auto& snaps = j["snapshots"];
    snaps = nlohmann::ordered_json::array();
    for (const auto& p : res.snapshot_paths) snaps.push_back(fs::relative(p, dir).string());
    res.result_path = (dir / "result.json").string();
    std::ofstream out(res.result_path, std::ios::binary);
    out << j.dump(2) << '\n';
    return res;
}

AnalysisResult analyze(const std::string& run_dir) {
    const fs::path dir(run_dir);
    const RunConfig config = load_config((dir / "config.cfg").string());
    const Table ts = read_table((dir / "timeseries.tsv").string());
    const auto t = ts.column("t");
    const auto rm = ts.column("rm_max");
    const auto b2 = ts.column("b2_peak");
    std::vector<SeriesSample> samples;
    for (std::size_t i = 0; i < t.size(); ++i) samples.push_back({t[i], rm[i], b2[i]});

    AnalysisResult out;
    std::tie(out.estimate, out.type) = estimate_from(samples, config.analysis);

    std::vector<fs::path> tables;
    const fs::path snap_dir = dir / "snapshots";
    if (fs::exists(snap_dir)) {
        for (const auto& e : fs::directory_iterator(snap_dir)) {
            if (e.path().extension() == ".tsv") tables.push_back(e.path());
        }
    }
    std::sort(tables.begin(), tables.end());
    for (const auto& p : tables) {
        const Snapshot snap = read_snapshot(p.string());
        const CurvatureField cf = curvature_field(snap.state);
        out.frames.push_back(frame_record(snap.state, cf, snap.meta.lambda_total, snap.meta.index,
                                          snap.meta.t_physical, config.analysis));
    }

    nlohmann::ordered_json j;
    j["format_version"] = kFormatVersion;
    j["estimate"] = estimate_json(out.estimate, out.type);
    auto& frames = j["frames"];
    frames = nlohmann::ordered_json::array();
    for (const auto& f : out.frames) frames.push_back(frame_json(f));
    out.path = (dir / "analysis.json").string();
    std::ofstream o(out.path, std::ios::binary);
    o << j.dump(2) << '\n';
    return out;
}

}  // namespace bergerflow
