#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "bergerflow/config.hpp"
#include "bergerflow/curvature.hpp"
#include "bergerflow/errors.hpp"
#include "bergerflow/initial_data.hpp"
#include "bergerflow/io.hpp"
#include "bergerflow/monitor.hpp"

using namespace bergerflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bergerflow_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("minimal config fills defaults") {
    const RunConfig c = parse_config("[initial]\nfamily = cap_cylinder\nB = 1\na = 0.3\n");
    CHECK(c.family == Family::CapCylinder);
    CHECK(c.params.B == 1.0);
    CHECK(c.params.a == 0.3);
    CHECK(c.grid == GridConfig{});
    CHECK(c.step == StepControl{});
    CHECK(c.monitor == MonitorTolerances{});
    CHECK(c.run.max_rescales == 40);
}

TEST_CASE("bad values name the key") {
    try {
        parse_config("[initial]\nfamily = cap_cylinder\n[grid]\ncluster_factor = -1\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "cluster_factor");
    }
    try {
        parse_config("[grid]\nn_nodes = 64\nn_nodes = 128\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "n_nodes");
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_config("[grid]\nflavour = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nt_max = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[grid]\nx_max = ten\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[initial]\nfamily = torus\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[nowhere]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[initial]\nfamily = cap_cylinder\na = 0.9\n"), ConfigError);
}

TEST_CASE("serialize then parse is the identity") {
    RunConfig c = parse_config("[initial]\nfamily = neck\nd = 0.55\nx0 = 2.5\n[run]\nt_max = 0.3\n[output]\ndir = out/x\n");
    c.monitor.sign = 2e-3;
    c.analysis.sigma_cmp = 4.0;
    c.seed = 7;
    c.params.w = 0.1 + 0.2;
    const RunConfig back = parse_config(serialize_config(c));
    CHECK(back == c);
    CHECK(serialize_config(back) == serialize_config(c));
}

TEST_CASE("load_config reads files and reports missing ones") {
    const fs::path dir = scratch("config");
    spit(dir / "a.cfg", "# comment\n[initial]\nfamily = flat\n");
    CHECK(load_config((dir / "a.cfg").string()).family == Family::Flat);
    CHECK_THROWS_AS(load_config((dir / "missing.cfg").string()), ConfigError);
}

}

TEST_SUITE("io") {

TEST_CASE("table round trip keeps every bit") {
    const fs::path dir = scratch("table");
    Table t;
    t.names = {"a", "b"};
    t.rows = {{0.1, 1.0 / 3.0}, {-1e-300, 6.02214076e23}};
    write_table(t, (dir / "t.tsv").string());
    const Table back = read_table((dir / "t.tsv").string());
    CHECK(back.names == t.names);
    CHECK(back.rows == t.rows);
    CHECK_THROWS_AS(back.column("c"), SchemaError);
    CHECK(slurp(dir / "t.tsv").rfind("# format_version=1\n", 0) == 0);
}

TEST_CASE("snapshot round trip") {
    const fs::path dir = scratch("snapshot");
    const MetricState st = construct_initial(Family::CapCylinder, FamilyParams{.a = 0.3},
                                             std::make_shared<const Grid>(build_grid(256, 10.0, 1.0)));
    const CurvatureField cf = curvature_field(st);
    const MonitorReport r = monitor_report(st, cf);
    const SnapshotMeta meta{3, 0.125, 77, 16.0, 1e-5, 2, 5};
    const std::string path = write_snapshot(st, cf, r, meta, dir.string());
    const Snapshot snap = read_snapshot(path);
    CHECK(snap.state.b == st.b);
    CHECK(snap.state.c == st.c);
    CHECK(snap.state.xi == st.xi);
    CHECK(std::ranges::equal(snap.state.grid->nodes(), st.grid->nodes()));
    CHECK(snap.columns.at("R") == cf.R);
    CHECK(monitor_fields(snap.report) == monitor_fields(r));
    CHECK(snap.meta.index == 3);
    CHECK(snap.meta.t_physical == 0.125);
    CHECK(snap.meta.lambda_total == 16.0);
    CHECK(snap.meta.regrid_count == 5);
}

TEST_CASE("damaged snapshots are rejected") {
    const fs::path dir = scratch("damaged");
    const MetricState st = flat_state(std::make_shared<const Grid>(build_grid(32, 4.0, 1.0)));
    const CurvatureField cf = curvature_field(st);
    const std::string path = write_snapshot(st, cf, monitor_report(st, cf), SnapshotMeta{}, dir.string());
    const std::string table = slurp(path);
    const fs::path manifest = fs::path(path).replace_extension(".json");
    const std::string json = slurp(manifest);

    SUBCASE("missing column") {
        std::string t = table;
        t.replace(t.find("\tk01"), 4, "\tk0X");
        spit(path, t);
        CHECK_THROWS_AS(read_snapshot(path), SchemaError);
    }
    SUBCASE("truncated table") {
        spit(path, table.substr(0, table.rfind('\n', table.size() - 2) + 1));
        CHECK_THROWS_AS(read_snapshot(path), SchemaError);
    }
    SUBCASE("version mismatch") {
        std::string j = json;
        const auto at = j.find("\"format_version\": 1");
        REQUIRE(at != std::string::npos);
        j.replace(at, 19, "\"format_version\": 2");
        spit(manifest, j);
        CHECK_THROWS_AS(read_snapshot(path), SchemaError);
    }
    SUBCASE("table version mismatch") {
        std::string t = table;
        t.replace(0, 18, "# format_version=9");
        spit(path, t);
        CHECK_THROWS_AS(read_snapshot(path), SchemaError);
    }
}

TEST_CASE("profile files") {
    const fs::path dir = scratch("profile");
    write_profile(bryant_profile(5.0), (dir / "b.tsv").string());
    const Table t = read_table((dir / "b.tsv").string());
    CHECK(t.has("sigma"));
    CHECK(t.has("phi"));
    CHECK(t.has("dphi"));
    CHECK(t.column("phi").front() == 0.0);
}

}
