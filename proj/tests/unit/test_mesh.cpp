#include <doctest.h>

#include <cmath>
#include <memory>

#include "bergerflow/errors.hpp"
#include "bergerflow/grid.hpp"
#include "bergerflow/metric_state.hpp"

using namespace bergerflow;

namespace {

std::shared_ptr<const Grid> grid_of(std::size_t n, double x_max, double k = 1.0) {
    return std::make_shared<const Grid>(build_grid(n, x_max, k));
}

MetricState state_with(std::shared_ptr<const Grid> g, double (*xi)(double), double (*b)(double)) {
    MetricState st;
    st.grid = g;
    for (double x : g->nodes()) {
        st.xi.push_back(xi(x));
        st.b.push_back(b(x));
        st.c.push_back(b(x));
    }
    return st;
}

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("uniform grid of 16 nodes is staggered") {
    const Grid g = build_grid(16, 1.0, 1.0);
    REQUIRE(g.size() == 16);
    for (std::size_t i = 0; i < 16; ++i) CHECK(g[i] == doctest::Approx((i + 0.5) / 16.0).epsilon(1e-15));
}

TEST_CASE("uniform grid spacing equals x_max / n") {
    const Grid g = build_grid(4096, 20.0, 1.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] - g[i - 1] == doctest::Approx(20.0 / 4096).epsilon(1e-9));
}

TEST_CASE("clustered grid follows the stretching map") {
    const std::size_t n = 1024;
    const double k = 4.0;
    const Grid g = build_grid(n, 20.0, k);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (i + 0.5) / n;
        CHECK(g[i] == doctest::Approx(20.0 * (std::pow(k, u) - 1.0) / (k - 1.0)).epsilon(1e-12));
    }
    const double first = g[1] - g[0];
    const double last = g[n - 1] - g[n - 2];
    CHECK(last / first == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("grid arguments out of range are rejected") {
    CHECK_THROWS_AS(build_grid(8, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(build_grid(64, -1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(build_grid(64, 1.0, 0.5), InvalidArgument);
    CHECK_THROWS_AS(build_grid(64, NAN, 1.0), InvalidArgument);
}

TEST_CASE("deriv_s of the flat b is one") {
    const MetricState st = flat_state(grid_of(256, 4.0));
    const RadialField bs = deriv_s(st.b_field(), st, 1);
    for (double v : bs.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("second derivative of x^3 is 6x") {
    const MetricState st = flat_state(grid_of(128, 2.0));
    RadialField f{{}, Parity::Odd};
    for (double x : st.grid->nodes()) f.values.push_back(x * x * x);
    const RadialField d2 = deriv_s(f, st, 2);
    for (std::size_t i = 0; i < st.size(); ++i) CHECK(d2[i] == doctest::Approx(6.0 * (*st.grid)[i]).epsilon(1e-9));
}

TEST_CASE("second derivative of an odd field converges at second order") {
    double err[2];
    for (int k = 0; k < 2; ++k) {
        const MetricState st = flat_state(grid_of(k == 0 ? 128 : 256, 2.0));
        RadialField f{{}, Parity::Odd};
        for (double x : st.grid->nodes()) f.values.push_back(std::sin(x));
        const RadialField d2 = deriv_s(f, st, 2);
        err[k] = 0.0;
        for (std::size_t i = 0; i < st.size(); ++i) {
            err[k] = std::max(err[k], std::abs(d2[i] + std::sin((*st.grid)[i])));
        }
    }
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("derivative of a constant even field vanishes") {
    const MetricState st = state_with(grid_of(64, 3.0), [](double x) { return 1.0 + x * x; },
                                      [](double x) { return x; });
    const RadialField d = deriv_s({std::vector<double>(64, 2.5), Parity::Even}, st, 1);
    for (double v : d.values) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("derivatives swap parity on symmetric functions") {
    const MetricState st = flat_state(grid_of(512, 2.0));
    RadialField odd{{}, Parity::Odd};
    RadialField even{{}, Parity::Even};
    for (double x : st.grid->nodes()) {
        odd.values.push_back(std::sin(x));
        even.values.push_back(std::cos(x));
    }
    const RadialField d_odd = deriv_s(odd, st, 1);
    const RadialField d_even = deriv_s(even, st, 1);
    for (std::size_t i = 0; i + 1 < st.size(); ++i) {
        const double x = (*st.grid)[i];
        CHECK(d_odd[i] == doctest::Approx(std::cos(x)).epsilon(1e-4));
        CHECK(d_even[i] == doctest::Approx(-std::sin(x)).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("deriv_s needs a parity and matching length") {
    const MetricState st = flat_state(grid_of(32, 1.0));
    CHECK_THROWS_AS(deriv_s({st.b, Parity::Unset}, st, 1), InvalidArgument);
    CHECK_THROWS_AS(deriv_s({std::vector<double>(31, 1.0), Parity::Even}, st, 1), InvalidArgument);
}

TEST_CASE("arclength of unit and doubled xi") {
    auto g = grid_of(100, 5.0);
    const MetricState one = state_with(g, [](double) { return 1.0; }, [](double x) { return x; });
    const MetricState two = state_with(g, [](double) { return 2.0; }, [](double x) { return x; });
    const RadialField s1 = arclength(one);
    const RadialField s2 = arclength(two);
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(s1[i] == doctest::Approx((*g)[i]).epsilon(1e-13));
        CHECK(s2[i] == doctest::Approx(2.0 * (*g)[i]).epsilon(1e-13));
    }
}

TEST_CASE("arclength of xi = 1 + x converges at second order") {
    double err[2];
    for (int k = 0; k < 2; ++k) {
        auto g = grid_of(k == 0 ? 100 : 200, 2.0);
        const MetricState st = state_with(g, [](double x) { return 1.0 + x; }, [](double x) { return x; });
        const RadialField s = arclength(st);
        err[k] = 0.0;
        for (std::size_t i = 0; i < g->size(); ++i) {
            const double x = (*g)[i];
            err[k] = std::max(err[k], std::abs(s[i] - (x + 0.5 * x * x)));
        }
        for (std::size_t i = 1; i < g->size(); ++i) CHECK(s[i] > s[i - 1]);
    }
    CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("state validation rejects non-positive entries") {
    MetricState st = flat_state(grid_of(32, 1.0));
    st.c[3] = -1.0;
    CHECK_THROWS_AS(st.validate(), NumericalBreakdown);
    st.c[3] = 1.0;
    st.xi.pop_back();
    CHECK_THROWS_AS(st.validate(), InvalidArgument);
}

}
