#include <doctest.h>

#include <cmath>
#include <memory>

#include "bergerflow/curvature.hpp"
#include "bergerflow/errors.hpp"
#include "bergerflow/soliton.hpp"

using namespace bergerflow;

TEST_SUITE("soliton") {

TEST_CASE("Bryant profile is regular at the tip") {
    const Profile p = bryant_profile(20.0);
    CHECK(p.kind == ProfileKind::Bryant);
    CHECK(p.phi[0] == 0.0);
    CHECK(p.dphi[0] == doctest::Approx(1.0));
    CHECK(p.phi[1] / p.sigma[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("Bryant profile is increasing and concave in the right way") {
    const Profile p = bryant_profile(50.0);
    for (std::size_t i = 1; i < p.sigma.size(); ++i) {
        CHECK(p.phi[i] > p.phi[i - 1]);
        CHECK(p.dphi[i] < p.dphi[i - 1]);
        CHECK(p.dphi[i] > 0.0);
        CHECK(p.dphi[i] < 1.0);
    }
    CHECK(p.residual < 1e-10);
}

TEST_CASE("Bryant profile opens like a paraboloid") {
    const Profile p = bryant_profile(1000.0, 1e-10, 0.5);
    // phi^2 / sigma settles to a constant; compare two far samples.
    const double a = p.phi_at(500.0) * p.phi_at(500.0) / 500.0;
    const double b = p.phi_at(1000.0) * p.phi_at(1000.0) / 1000.0;
    CHECK(a > 0.0);
    CHECK(std::abs(b - a) / a < 0.05);
}

TEST_CASE("Bryant profile converges under tolerance refinement") {
    const Profile coarse = bryant_profile(30.0, 1e-8);
    const Profile fine = bryant_profile(30.0, 1e-10);
    REQUIRE(coarse.sigma.size() == fine.sigma.size());
    double diff = 0.0;
    for (std::size_t i = 0; i < fine.sigma.size(); ++i) diff = std::max(diff, std::abs(coarse.phi[i] - fine.phi[i]));
    CHECK(diff < 10 * 1e-8);
}

TEST_CASE("Bryant profile is deterministic") {
    const Profile a = bryant_profile(10.0, 1e-9, 0.02);
    const Profile b = bryant_profile(10.0, 1e-9, 0.02);
    CHECK(a.phi == b.phi);
}

TEST_CASE("Bryant arguments out of range") {
    CHECK_THROWS_AS(bryant_profile(2000.0), InvalidArgument);
    CHECK_THROWS_AS(bryant_profile(10.0, 1e-12), InvalidArgument);
}

TEST_CASE("cylinder profiles are constant") {
    const Profile two = cylinder_profile(2.0, 10.0);
    for (double v : two.phi) CHECK(v == 2.0);
    for (double v : two.dphi) CHECK(v == 0.0);
    const Profile unit = cylinder_profile(std::sqrt(6.0), 5.0);
    CHECK(6.0 / (unit.phi[0] * unit.phi[0]) == doctest::Approx(1.0));
    CHECK_THROWS_AS(cylinder_profile(0.0, 1.0), InvalidArgument);
}

TEST_CASE("radius one cylinder has k12 = k13 = 1 and R = 6") {
    MetricState st;
    st.grid = std::make_shared<const Grid>(build_grid(32, 2.0, 1.0));
    st.inner = InnerBoundary::Mirror;
    const Profile p = cylinder_profile(1.0, 2.0);
    st.b.assign(32, p.phi[0]);
    st.c.assign(32, p.phi[0]);
    st.xi.assign(32, 1.0);
    const CurvatureField cf = curvature_field(st);
    CHECK(cf.k12[5] == doctest::Approx(1.0));
    CHECK(cf.k13[5] == doctest::Approx(1.0));
    CHECK(cf.R[5] == doctest::Approx(6.0));
}

}
