#include <doctest.h>

#include <cmath>
#include <memory>

#include "bergerflow/curvature.hpp"
#include "bergerflow/errors.hpp"
#include "oracles.hpp"

using namespace bergerflow;

namespace {

MetricState uniform_state(std::size_t n, double x_max, double xi, double b, double c, InnerBoundary inner) {
    MetricState st;
    st.grid = std::make_shared<const Grid>(build_grid(n, x_max, 1.0));
    st.inner = inner;
    st.xi.assign(n, xi);
    st.b.assign(n, b);
    st.c.assign(n, c);
    return st;
}

}  // namespace

TEST_SUITE("curvature") {

TEST_CASE("flat space has zero curvature and H = 3/x") {
    const MetricState st = flat_state(std::make_shared<const Grid>(build_grid(512, 5.0, 1.0)));
    const CurvatureField cf = curvature_field(st);
    for (std::size_t i = 0; i < st.size(); ++i) {
        CHECK(std::abs(cf.k01[i]) < 1e-8);
        CHECK(std::abs(cf.k03[i]) < 1e-8);
        CHECK(std::abs(cf.k12[i]) < 1e-8);
        CHECK(std::abs(cf.k13[i]) < 1e-8);
        CHECK(std::abs(cf.R[i]) < 1e-7);
        CHECK(cf.H[i] == doctest::Approx(3.0 / (*st.grid)[i]).epsilon(1e-10));
    }
    CHECK(curvature_sign_summary(cf).all_nonnegative);
}

TEST_CASE("constant Berger slice b = 1, c = 1/2") {
    const MetricState st = uniform_state(64, 4.0, 1.0, 1.0, 0.5, InnerBoundary::Mirror);
    const CurvatureField cf = curvature_field(st);
    for (std::size_t i = 0; i < st.size(); ++i) {
        CHECK(cf.k12[i] == doctest::Approx(13.0 / 4.0));
        CHECK(cf.k13[i] == doctest::Approx(1.0 / 4.0));
        CHECK(std::abs(cf.k01[i]) < 1e-12);
        CHECK(std::abs(cf.k03[i]) < 1e-12);
        CHECK(cf.R[i] == doctest::Approx(7.5));
    }
}

TEST_CASE("round cylinder slice") {
    const double r = 0.7;
    const MetricState st = uniform_state(64, 4.0, 1.0, r, r, InnerBoundary::Mirror);
    const CurvatureField cf = curvature_field(st);
    for (std::size_t i = 0; i < st.size(); ++i) {
        CHECK(cf.k12[i] == doctest::Approx(1.0 / (r * r)));
        CHECK(cf.k13[i] == doctest::Approx(1.0 / (r * r)));
        CHECK(cf.R[i] == doctest::Approx(6.0 / (r * r)));
        CHECK(std::abs(cf.H[i]) < 1e-12);
    }
    CHECK(cf.rm_max == doctest::Approx(1.0 / (r * r)));
    const SignSummary sign = curvature_sign_summary(cf);
    CHECK(sign.all_nonnegative);
    CHECK(std::abs(sign.minimum[0]) < 1e-12);
}

TEST_CASE("scalar curvature matches a brute-force recomputation") {
    const std::size_t n = 400;
    const double x_max = 4.0;
    const double h = x_max / n;
    MetricState st;
    st.grid = std::make_shared<const Grid>(build_grid(n, x_max, 1.0));
    for (double x : st.grid->nodes()) {
        st.xi.push_back(1.0 + 0.3 * x * x / (1.0 + x * x));
        st.b.push_back(std::tanh(x) * (1.0 + 0.1 * x * x) / (1.0 + 0.05 * x * x));
        st.c.push_back(std::tanh(x) * (1.0 - 0.3 * std::tanh(x) * std::tanh(x)));
    }
    const CurvatureField cf = curvature_field(st);
    const oracle::Curvatures bf = oracle::brute_force_curvatures(st.xi, st.b, st.c, h);
    for (std::size_t i = n / 8; i + 1 < n; ++i) {
        CHECK(cf.R[i] == doctest::Approx(2 * (2 * cf.k01[i] + cf.k03[i] + cf.k12[i] + 2 * cf.k13[i])).epsilon(1e-14));
        const double scale = 1.0 + std::abs(bf.R[i]);
        CHECK(std::abs(cf.R[i] - bf.R[i]) / scale < 2e-3);
        CHECK(std::abs(cf.H[i] - bf.H[i]) / (1.0 + std::abs(bf.H[i])) < 1e-3);
    }
}

TEST_CASE("b = c gives k12 = k13 and k01 = k03") {
    MetricState st = flat_state(std::make_shared<const Grid>(build_grid(256, 6.0, 1.0)));
    for (std::size_t i = 0; i < st.size(); ++i) st.b[i] = st.c[i] = std::tanh((*st.grid)[i]);
    const CurvatureField cf = curvature_field(st);
    for (std::size_t i = 0; i < st.size(); ++i) {
        CHECK(cf.k12[i] == doctest::Approx(cf.k13[i]).epsilon(1e-13));
        CHECK(cf.k01[i] == doctest::Approx(cf.k03[i]).epsilon(1e-13));
    }
}

}
