#include "bergerflow/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bergerflow/errors.hpp"

namespace bergerflow {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kSnapshotColumns{"x", "xi", "b", "c", "s", "k01", "k03", "k12", "k13", "R", "H"};

std::string version_line() { return "# format_version=" + std::to_string(kFormatVersion); }

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    return out;
}

double parse_real(const std::string& tok, const std::string& path, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw SchemaError(path + ":" + std::to_string(line) + ": malformed value '" + tok + "'");
    }
}

std::string manifest_path(const std::string& table_path) {
    return fs::path(table_path).replace_extension(".json").string();
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> Table::column(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw SchemaError("missing column '" + name + "'");
    const std::size_t k = static_cast<std::size_t>(it - names.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[k]);
    return out;
}

bool Table::has(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

void write_table(const Table& table, const std::string& path) {
    auto out = open_out(path);
    out << version_line() << '\n';
    for (std::size_t k = 0; k < table.names.size(); ++k) out << (k ? "\t" : "") << table.names[k];
    out << '\n';
    for (const auto& r : table.rows) {
        if (r.size() != table.names.size()) throw InvalidArgument("table row width does not match the header");
        for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "\t" : "") << format_real(r[k]);
        out << '\n';
    }
    if (!out) throw Error("write failed for '" + path + "'");
}

Table read_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != version_line()) {
        throw SchemaError(path + ": unsupported or missing format_version (expected " +
                          std::to_string(kFormatVersion) + ")");
    }
    Table t;
    if (!std::getline(in, line)) throw SchemaError(path + ": missing header");
    {
        std::istringstream hs(line);
        std::string name;
        while (std::getline(hs, name, '\t')) t.names.push_back(name);
    }
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, '\t')) row.push_back(parse_real(tok, path, line_no));
        if (row.size() != t.names.size()) {
            throw SchemaError(path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(t.names.size()) + " values, found " + std::to_string(row.size()));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string write_snapshot(const MetricState& state, const CurvatureField& cf, const MonitorReport& report,
                           const SnapshotMeta& meta, const std::string& dir) {
    if (cf.size() != state.size()) throw InvalidArgument("write_snapshot: curvature field does not match the state");
    fs::create_directories(dir);
    char name[32];
    std::snprintf(name, sizeof name, "snap_%04zu.tsv", meta.index);
    const std::string path = (fs::path(dir) / name).string();

    const RadialField s = arclength(state);
    Table t;
    t.names = kSnapshotColumns;
    const Grid& g = *state.grid;
    for (std::size_t i = 0; i < state.size(); ++i) {
        t.rows.push_back({g[i], state.xi[i], state.b[i], state.c[i], s[i], cf.k01[i], cf.k03[i], cf.k12[i],
                          cf.k13[i], cf.R[i], cf.H[i]});
    }
    write_table(t, path);

    nlohmann::ordered_json m;
    m["format_version"] = kFormatVersion;
    m["index"] = meta.index;
    m["t"] = format_real(meta.t_physical);
    m["t_state"] = format_real(state.t);
    m["step"] = meta.step;
    m["lambda_total"] = format_real(meta.lambda_total);
    m["dt"] = format_real(meta.dt);
    m["rescale_count"] = meta.rescale_count;
    m["regrid_count"] = meta.regrid_count;
    m["n_nodes"] = state.size();
    m["x_max"] = format_real(g.x_max());
    m["cluster_factor"] = format_real(g.cluster_factor());
    m["inner"] = state.inner == InnerBoundary::Origin ? "origin" : "mirror";
    m["rm_max"] = format_real(cf.rm_max);
    auto& mon = m["monitor"];
    for (const auto& [k, v] : monitor_fields(report)) mon[k] = format_real(v);
    auto out = open_out(manifest_path(path));
    out << m.dump(2) << '\n';
    return path;
}

Snapshot read_snapshot(const std::string& table_path) {
    const std::string mpath = manifest_path(table_path);
    std::ifstream min(mpath);
    if (!min) throw SchemaError("missing manifest '" + mpath + "'");
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(min);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(mpath + ": " + e.what());
    }
    auto req = [&](const char* key) -> const nlohmann::json& {
        if (!m.contains(key)) throw SchemaError(mpath + ": missing field '" + std::string(key) + "'");
        return m.at(key);
    };
    auto real = [&](const char* key) { return parse_real(req(key).get<std::string>(), mpath, 0); };
    if (req("format_version").get<int>() != kFormatVersion) {
        throw SchemaError(mpath + ": format_version " + m["format_version"].dump() + " is not supported");
    }
    const Table t = read_table(table_path);
    for (const auto& col : kSnapshotColumns) {
        if (!t.has(col)) throw SchemaError(table_path + ": missing column '" + col + "'");
    }
    const std::size_t n = req("n_nodes").get<std::size_t>();
    if (t.rows.size() != n) {
        throw SchemaError(table_path + ": truncated table (" + std::to_string(t.rows.size()) + " of " +
                          std::to_string(n) + " rows)");
    }

    Snapshot snap;
    for (const auto& col : kSnapshotColumns) snap.columns[col] = t.column(col);
    snap.state.grid = std::make_shared<const Grid>(
        Grid::from_nodes(snap.columns["x"], real("x_max"), real("cluster_factor")));
    snap.state.xi = snap.columns["xi"];
    snap.state.b = snap.columns["b"];
    snap.state.c = snap.columns["c"];
    snap.state.t = real("t_state");
    const std::string inner = req("inner").get<std::string>();
    if (inner != "origin" && inner != "mirror") throw SchemaError(mpath + ": unknown inner boundary '" + inner + "'");
    snap.state.inner = inner == "origin" ? InnerBoundary::Origin : InnerBoundary::Mirror;
    snap.state.validate();

    snap.meta.index = req("index").get<std::size_t>();
    snap.meta.t_physical = real("t");
    snap.meta.step = req("step").get<std::size_t>();
    snap.meta.lambda_total = real("lambda_total");
    snap.meta.dt = real("dt");
    snap.meta.rescale_count = req("rescale_count").get<std::size_t>();
    snap.meta.regrid_count = req("regrid_count").get<std::size_t>();

    std::vector<std::pair<std::string, double>> fields;
    for (const auto& [k, v] : req("monitor").items()) fields.emplace_back(k, parse_real(v.get<std::string>(), mpath, 0));
    snap.report = monitor_from_fields(fields);
    return snap;
}

void write_profile(const Profile& profile, const std::string& path) {
    Table t;
    t.names = {"sigma", "phi", "dphi"};
    const bool bryant = profile.kind == ProfileKind::Bryant;
    if (bryant) t.names.push_back("dpotential");
    for (std::size_t i = 0; i < profile.sigma.size(); ++i) {
        std::vector<double> row{profile.sigma[i], profile.phi[i], profile.dphi[i]};
        if (bryant) row.push_back(profile.dpotential[i]);
        t.rows.push_back(std::move(row));
    }
    write_table(t, path);
}

}  // namespace bergerflow
