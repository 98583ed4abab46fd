#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "bergerflow/curvature.hpp"
#include "bergerflow/errors.hpp"
#include "bergerflow/flow.hpp"
#include "bergerflow/initial_data.hpp"
#include "bergerflow/monitor.hpp"

using namespace bergerflow;

namespace {

std::shared_ptr<const Grid> grid(std::size_t n, double x_max) {
    return std::make_shared<const Grid>(build_grid(n, x_max, 1.0));
}

MonitorReport report_of(const MetricState& st) { return monitor_report(st, curvature_field(st)); }

IdentityWindow window(MetricState st, double dt) {
    IdentityWindow w;
    w.states.push_back(st);
    for (int k = 0; k < 2; ++k) {
        st = heun_step(st, dt);
        w.states.push_back(st);
    }
    return w;
}

const MonotoneVerdict& named(const std::vector<MonotoneVerdict>& vs, const std::string& name) {
    for (const auto& v : vs) {
        if (v.name == name) return v;
    }
    FAIL("no verdict named " << name);
    return vs.front();
}

}  // namespace

TEST_SUITE("monitor") {

TEST_CASE("flat report") {
    const MonitorReport r = report_of(flat_state(grid(512, 10.0)));
    CHECK(r.ratio_min == 1.0);
    CHECK(r.ratio_max == 1.0);
    CHECK(r.min_H > 0.0);
    CHECK(r.sup_pos_phi4 == 0.0);
    CHECK(r.cH_origin == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("cylinder slice report") {
    const double r0 = 1.5;
    const MonitorReport r = report_of(construct_initial(Family::Cylinder, FamilyParams{.r = r0}, grid(128, 8.0)));
    CHECK(r.min_bs == doctest::Approx(0.0));
    CHECK(r.min_H == doctest::Approx(0.0));
    CHECK(r.sup_pos_phi4 == 0.0);
    CHECK(r.sup_b2rm == doctest::Approx(1.0));
    CHECK(r.sup_b == doctest::Approx(r0));
}

TEST_CASE("cap cylinder with a = 0.3 at t = 0") {
    const MonitorReport r =
        report_of(construct_initial(Family::CapCylinder, FamilyParams{.B = 1.0, .a = 0.3}, grid(2048, 20.0)));
    CHECK(r.min_bs >= -1e-6);
    CHECK(r.min_H >= -1e-6);
    CHECK(r.ratio_min == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("rescaled report is expressed in physical units") {
    const MetricState st = construct_initial(Family::Cylinder, FamilyParams{.r = 2.0}, grid(64, 8.0));
    FlowState f;
    f.state = st;
    const FlowState g = rescale_continue(f, 4.0);
    const MonitorReport a = report_of(st);
    const MonitorReport b = monitor_report(g.state, curvature_field(g.state), g.lambda_total);
    CHECK(b.sup_b == doctest::Approx(a.sup_b));
    CHECK(b.rm_max == doctest::Approx(a.rm_max));
    CHECK(b.sup_b2rm == doctest::Approx(a.sup_b2rm));
}

TEST_CASE("monitor fields round trip") {
    const MonitorReport r = report_of(construct_initial(Family::CapCylinder, FamilyParams{}, grid(256, 10.0)));
    auto fields = monitor_fields(r);
    const MonitorReport back = monitor_from_fields(fields);
    CHECK(monitor_fields(back) == fields);
    fields.pop_back();
    CHECK_THROWS_AS(monitor_from_fields(fields), SchemaError);
}

TEST_CASE("two flat reports pass every check") {
    const MonitorReport r = report_of(flat_state(grid(256, 10.0)));
    MonitorReport later = r;
    later.t = 0.1;
    for (InitialClass cls : {InitialClass::G, InitialClass::GInf, InitialClass::Other}) {
        const auto vs = check_monotone({r, later}, cls, 1.0);
        CHECK_FALSE(vs.empty());
        for (const auto& v : vs) {
            CHECK(v.pass);
            CHECK(std::isnan(v.t_fail));
        }
    }
}

TEST_CASE("min H dropping below zero fails the H check") {
    const MonitorReport r =
        report_of(construct_initial(Family::CapCylinder, FamilyParams{.B = 1.0, .a = 0.3}, grid(512, 10.0)));
    MonitorReport bad = r;
    bad.t = 0.05;
    bad.min_H = -0.1;
    bad.min_cH = -0.1;
    const auto vs = check_monotone({r, bad}, InitialClass::G, 0.7);
    const MonotoneVerdict& h = named(vs, "min_H");
    CHECK_FALSE(h.pass);
    CHECK(h.t_fail == doctest::Approx(0.05));
    CHECK_FALSE(h.hard);
    CHECK(named(vs, "min_bs").pass);
}

TEST_CASE("ratio checks are hard and apply to every class") {
    const MonitorReport r = report_of(flat_state(grid(128, 5.0)));
    MonitorReport bad = r;
    bad.t = 0.2;
    bad.ratio_max = 1.0 + 1e-6;
    for (InitialClass cls : {InitialClass::Neck, InitialClass::Other}) {
        const auto vs = check_monotone({r, bad}, cls, 1.0);
        CHECK(vs.size() == 2);
        CHECK_FALSE(named(vs, "ratio_upper").pass);
        CHECK(named(vs, "ratio_upper").hard);
    }
}

TEST_CASE("tracker reports each failure once") {
    const MonitorReport r =
        report_of(construct_initial(Family::CapCylinder, FamilyParams{.B = 1.0}, grid(512, 10.0)));
    MonotoneTracker tracker(InitialClass::G, 1.0);
    CHECK(tracker.feed(r).empty());
    MonitorReport grown = r;
    grown.t = 0.1;
    grown.sup_b = r.sup_b * 1.01;
    const auto first = tracker.feed(grown);
    REQUIRE(first.size() == 1);
    CHECK(first[0].name == "sup_b");
    grown.t = 0.2;
    CHECK(tracker.feed(grown).empty());
    CHECK_FALSE(named(tracker.verdicts(), "sup_b").pass);
}

TEST_CASE("check_monotone needs two reports and valid tolerances") {
    const MonitorReport r = report_of(flat_state(grid(64, 5.0)));
    CHECK_THROWS_AS(check_monotone({r}, InitialClass::G, 1.0), InvalidArgument);
    MonitorTolerances tol;
    tol.sign = -1.0;
    CHECK_THROWS_AS(tol.validate(), InvalidArgument);
}

TEST_CASE("flat window has vanishing identity residuals") {
    const auto res = verify_evolution_identities(window(flat_state(grid(512, 10.0)), 1e-4));
    CHECK(res.size() == 7);
    for (const auto& r : res) CHECK(r.residual < 1e-8);
}

TEST_CASE("cylinder window has vanishing f and cH residuals") {
    const auto res =
        verify_evolution_identities(window(construct_initial(Family::Cylinder, FamilyParams{.r = 1.0}, grid(256, 8.0)), 1e-5));
    for (const auto& r : res) {
        if (r.name == "log_c_over_b" || r.name == "cH") CHECK(r.residual < 1e-10);
        CHECK(r.residual < 1e-6);
    }
}

TEST_CASE("identity residuals are second order in the grid") {
    auto residuals = [](std::size_t n) {
        const MetricState st =
            construct_initial(Family::CapCylinder, FamilyParams{.B = 1.0, .a = 0.3}, grid(n, 10.0));
        const double dt = 0.2 * select_dt(st, curvature_field(st), StepControl{});
        return verify_evolution_identities(window(st, dt));
    };
    const auto coarse = residuals(512);
    const auto fine = residuals(1024);
    REQUIRE(coarse.size() == fine.size());
    for (std::size_t q = 0; q < coarse.size(); ++q) {
        INFO(coarse[q].name << " " << coarse[q].residual << " -> " << fine[q].residual);
        CHECK(coarse[q].residual / fine[q].residual > 3.0);
    }
}

TEST_CASE("identity window errors") {
    const MetricState st = flat_state(grid(64, 5.0));
    IdentityWindow two;
    two.states = {st, st};
    CHECK_THROWS_AS(verify_evolution_identities(two), InvalidArgument);
    IdentityWindow mixed;
    mixed.states = {st, st, flat_state(grid(64, 6.0))};
    CHECK_THROWS_AS(verify_evolution_identities(mixed), InvalidArgument);
}

}
