#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "bergerflow/curvature.hpp"
#include "bergerflow/errors.hpp"
#include "bergerflow/initial_data.hpp"
#include "bergerflow/singularity.hpp"
#include "bergerflow/soliton.hpp"

using namespace bergerflow;

namespace {

// Samples t_k = T (1 - q^k) approach T geometrically.
std::vector<SeriesSample> series(double T, std::size_t count, double (*rm)(double), double (*b2)(double)) {
    std::vector<SeriesSample> out;
    for (std::size_t k = 0; k < count; ++k) {
        const double t = T * (1.0 - std::pow(0.8, static_cast<double>(k)));
        out.push_back({t, rm(T - t), b2(T - t)});
    }
    return out;
}

MetricState cylinder(double r) {
    return construct_initial(Family::Cylinder, FamilyParams{.r = r},
                             std::make_shared<const Grid>(build_grid(256, 12.0, 1.0)));
}

}  // namespace

TEST_SUITE("singularity") {

TEST_CASE("exact cylinder series gives T = 1/4") {
    const auto s = series(
        0.25, 60, [](double tau) { return 1.0 / (4.0 * tau); }, [](double tau) { return 4.0 * tau; });
    const SingularityEstimate e = estimate_T(s);
    REQUIRE(e.singular);
    CHECK(std::abs(e.T_est - 0.25) < 1e-3);
    for (std::size_t k = e.fit_begin; k < e.N_series.size(); ++k) {
        CHECK(e.N_series[k].second >= 0.24);
        CHECK(e.N_series[k].second <= 0.26);
    }
}

TEST_CASE("flat series is not singular") {
    std::vector<SeriesSample> s;
    for (int k = 0; k < 50; ++k) s.push_back({0.01 * k, 1e-12, 1.0});
    const SingularityEstimate e = estimate_T(s);
    CHECK_FALSE(e.singular);
    CHECK(e.method == TMethod::None);
}

TEST_CASE("short or unordered series") {
    std::vector<SeriesSample> s;
    for (int k = 0; k < 5; ++k) s.push_back({0.01 * k, std::pow(10.0, k), 1.0});
    CHECK_FALSE(estimate_T(s).singular);
    auto bad = series(
        0.25, 30, [](double tau) { return 1.0 / tau; }, [](double tau) { return tau; });
    std::swap(bad[3], bad[4]);
    CHECK_THROWS_AS(estimate_T(bad), InvalidArgument);
}

TEST_CASE("Type-II series prefers the b^2 root") {
    const auto s = series(
        0.25, 80, [](double tau) { return std::pow(tau, -1.5); }, [](double tau) { return 4.0 * tau; });
    const SingularityEstimate e = estimate_T(s);
    REQUIRE(e.singular);
    CHECK(e.method == TMethod::LinearB2);
    CHECK(std::abs(e.T_est - 0.25) < 0.05 * 0.25);
}

TEST_CASE("classification of exact and synthetic series") {
    const auto cyl = series(
        0.25, 80, [](double tau) { return 1.0 / (4.0 * tau); }, [](double tau) { return 4.0 * tau; });
    CHECK(classify_type(estimate_T(cyl)).verdict == TypeVerdict::TypeI);

    const auto two = series(
        0.25, 80, [](double tau) { return std::pow(tau, -1.5); }, [](double tau) { return 4.0 * tau; });
    const TypeClassification c2 = classify_type(estimate_T(two));
    CHECK(c2.verdict == TypeVerdict::TypeIIIndicated);
    CHECK(c2.slope == doctest::Approx(-0.5).epsilon(0.05));
}

TEST_CASE("Type-I series with 5 percent noise stays Type I") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    std::vector<SeriesSample> s;
    for (int k = 0; k < 80; ++k) {
        const double tau = 0.25 * std::pow(0.85, k);
        s.push_back({0.25 - tau, (1.0 + noise(rng)) / (4.0 * tau), 4.0 * tau * (1.0 + noise(rng))});
    }
    CHECK(classify_type(estimate_T(s)).verdict == TypeVerdict::TypeI);
}

TEST_CASE("under one decade is undetermined") {
    const auto s = series(
        0.25, 80, [](double tau) { return 1.0 / (4.0 * tau); }, [](double tau) { return 4.0 * tau; });
    SingularityEstimate e = estimate_T(s);
    REQUIRE(e.singular);
    // Keep only the last half decade.
    const double rm_last = e.rm_series.back();
    std::size_t k = 0;
    while (e.rm_series[k] < rm_last / 3.0) ++k;
    e.N_series.erase(e.N_series.begin(), e.N_series.begin() + static_cast<long>(k));
    e.rm_series.erase(e.rm_series.begin(), e.rm_series.begin() + static_cast<long>(k));
    e.fit_begin = 0;
    CHECK(classify_type(e).verdict == TypeVerdict::Undetermined);
    TypeThresholds th;
    th.type_two = 0.5;
    CHECK_THROWS_AS(th.validate(), InvalidArgument);
}

TEST_CASE("cylinder frame is the radius sqrt 6 cylinder") {
    const double r = 0.7;
    const MetricState st = cylinder(r);
    const BlowupFrame f = blowup_frame(st, curvature_field(st), false);
    CHECK(f.lambda == doctest::Approx(6.0 / (r * r)));
    for (std::size_t i = 0; i < f.sigma.size(); ++i) {
        CHECK(f.b_tilde[i] == doctest::Approx(std::sqrt(6.0)));
        CHECK(f.c_tilde[i] == doctest::Approx(std::sqrt(6.0)));
    }
    const ProfileDistance same = compare_profile(f, cylinder_profile(std::sqrt(6.0), 10.0));
    CHECK(same.distance < 1e-10);
    CHECK(same.rotational_defect < 1e-12);
    const ProfileDistance bryant = compare_profile(f, bryant_profile(10.0));
    CHECK(bryant.distance > 0.2);
}

TEST_CASE("flat frame has no scale") {
    const MetricState st = flat_state(std::make_shared<const Grid>(build_grid(128, 5.0, 1.0)));
    CHECK_THROWS_AS(blowup_frame(st, curvature_field(st), true), InvalidArgument);
}

TEST_CASE("comparison range must be covered") {
    const MetricState st = cylinder(1.0);
    const BlowupFrame f = blowup_frame(st, curvature_field(st), false, 4.0);
    CHECK_THROWS_AS(compare_profile(f, cylinder_profile(std::sqrt(6.0), 10.0), 5.0), InvalidArgument);
    CHECK_THROWS_AS(compare_profile(blowup_frame(st, curvature_field(st), false), cylinder_profile(std::sqrt(6.0), 3.0)),
                    InvalidArgument);
}

TEST_CASE("minimal spheres") {
    auto g = std::make_shared<const Grid>(build_grid(1024, 10.0, 1.0));
    const MetricState flat = flat_state(g);
    CHECK(detect_minimal_spheres(flat, curvature_field(flat)).empty());
    const MetricState neck = construct_initial(Family::Neck, FamilyParams{.d = 0.6, .x0 = 3.0, .w = 1.0}, g);
    const auto spheres = detect_minimal_spheres(neck, curvature_field(neck));
    REQUIRE(spheres.size() >= 1);
    REQUIRE(spheres.size() <= 2);
    for (const auto& m : spheres) CHECK(std::abs(m.x - 3.0) < 1.5);
    const MetricState cap = construct_initial(Family::CapCylinder, FamilyParams{}, g);
    CHECK(detect_minimal_spheres(cap, curvature_field(cap)).empty());
}

}
