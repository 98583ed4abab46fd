#include "bergerflow/metric_state.hpp"

#include <cmath>
#include <string>

#include "bergerflow/errors.hpp"

namespace bergerflow {

namespace {

void check_positive(const std::vector<double>& v, const char* name, const Grid& grid) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]) || !(v[i] > 0.0)) {
            throw NumericalBreakdown(std::string(name) + " not finite and positive", i, grid[i]);
        }
    }
}

}  // namespace

void MetricState::validate() const {
    if (!grid) throw InvalidArgument("metric state has no grid");
    const std::size_t n = grid->size();
    if (xi.size() != n || b.size() != n || c.size() != n) {
        throw InvalidArgument("metric state arrays do not match grid length");
    }
    if (!std::isfinite(t)) throw InvalidArgument("metric state time is not finite");
    check_positive(xi, "xi", *grid);
    check_positive(b, "b", *grid);
    check_positive(c, "c", *grid);
}

namespace {

void stencil_x1(const Grid& grid, std::span<const double> f, double ghost, std::span<double> out) {
    const std::size_t n = grid.size();
    {
        const auto& w = grid.d1(0);
        out[0] = w.left * ghost + w.centre * f[0] + w.right * f[1];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const auto& w = grid.d1(i);
        out[i] = w.left * f[i - 1] + w.centre * f[i] + w.right * f[i + 1];
    }
    const auto& wo = grid.d1_outer();
    out[n - 1] = wo[0] * f[n - 1] + wo[1] * f[n - 2] + wo[2] * f[n - 3];
}

void stencil_x2(const Grid& grid, std::span<const double> f, double ghost, std::span<double> out) {
    const std::size_t n = grid.size();
    {
        const auto& w = grid.d2(0);
        out[0] = w.left * ghost + w.centre * f[0] + w.right * f[1];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const auto& w = grid.d2(i);
        out[i] = w.left * f[i - 1] + w.centre * f[i] + w.right * f[i + 1];
    }
    const auto& wo = grid.d2_outer();
    out[n - 1] = wo[0] * f[n - 1] + wo[1] * f[n - 2] + wo[2] * f[n - 3] + wo[3] * f[n - 4];
}

}  // namespace

// Odd fields are differentiated through the even quotient F = f / x, which
// keeps the error of f_x - f / x at O(h^2 x^2) next to the origin.
void diff_x1(const Grid& grid, std::span<const double> f, Parity parity, std::span<double> out) {
    if (parity != Parity::Odd) {
        stencil_x1(grid, f, f[0], out);
        return;
    }
    const std::size_t n = grid.size();
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = f[i] / grid[i];
    stencil_x1(grid, q, q[0], out);
    for (std::size_t i = 0; i < n; ++i) out[i] = q[i] + grid[i] * out[i];
}

void diff_x2(const Grid& grid, std::span<const double> f, Parity parity, std::span<double> out) {
    if (parity != Parity::Odd) {
        stencil_x2(grid, f, f[0], out);
        return;
    }
    const std::size_t n = grid.size();
    std::vector<double> q(n), qx(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = f[i] / grid[i];
    stencil_x1(grid, q, q[0], qx);
    stencil_x2(grid, q, q[0], out);
    for (std::size_t i = 0; i < n; ++i) out[i] = 2.0 * qx[i] + grid[i] * out[i];
}

RadialField deriv_s(const RadialField& field, const MetricState& state, int order) {
    if (field.parity == Parity::Unset) throw InvalidArgument("deriv_s: field parity is unset");
    if (!state.grid || field.size() != state.grid->size() || state.xi.size() != field.size()) {
        throw InvalidArgument("deriv_s: field length does not match the state grid");
    }
    if (order != 1 && order != 2) throw InvalidArgument("deriv_s: order must be 1 or 2");
    const Grid& grid = *state.grid;
    const std::size_t n = grid.size();
    RadialField out{std::vector<double>(n), order == 1 ? flip(field.parity) : field.parity};
    std::vector<double> fx(n);
    diff_x1(grid, field.values, field.parity, fx);
    if (order == 1) {
        for (std::size_t i = 0; i < n; ++i) out.values[i] = fx[i] / state.xi[i];
        return out;
    }
    std::vector<double> fxx(n), xix(n);
    diff_x2(grid, field.values, field.parity, fxx);
    diff_x1(grid, state.xi, Parity::Even, xix);
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = state.xi[i];
        out.values[i] = (fxx[i] - xix[i] / xi * fx[i]) / (xi * xi);
    }
    return out;
}

OrbitDerivatives orbit_derivatives(const MetricState& state) {
    const Grid& grid = *state.grid;
    const std::size_t n = grid.size();
    const Parity p = state.orbit_parity();
    OrbitDerivatives d{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                       std::vector<double>(n)};
    std::vector<double> xix(n);
    diff_x1(grid, state.xi, Parity::Even, xix);
    diff_x1(grid, state.b, p, d.bs);
    diff_x2(grid, state.b, p, d.bss);
    diff_x1(grid, state.c, p, d.cs);
    diff_x2(grid, state.c, p, d.css);
    for (std::size_t i = 0; i < n; ++i) {
        const double inv = 1.0 / state.xi[i];
        const double drift = xix[i] * inv;
        d.bss[i] = (d.bss[i] - drift * d.bs[i]) * inv * inv;
        d.css[i] = (d.css[i] - drift * d.cs[i]) * inv * inv;
        d.bs[i] *= inv;
        d.cs[i] *= inv;
    }
    return d;
}

RadialField arclength(const MetricState& state) {
    const Grid& grid = *state.grid;
    const std::size_t n = grid.size();
    RadialField s{std::vector<double>(n), Parity::Odd};
    s.values[0] = state.xi[0] * grid[0];
    for (std::size_t i = 1; i < n; ++i) {
        s.values[i] = s.values[i - 1] + 0.5 * (state.xi[i - 1] + state.xi[i]) * (grid[i] - grid[i - 1]);
    }
    return s;
}

RadialField arclength_corrected(const MetricState& state) {
    const Grid& grid = *state.grid;
    const std::size_t n = grid.size();
    std::vector<double> xxx(n);
    diff_x2(grid, state.xi, Parity::Even, xxx);
    RadialField s{std::vector<double>(n), Parity::Odd};
    const double x0 = grid[0];
    s.values[0] = state.xi[0] * x0 - xxx[0] * x0 * x0 * x0 / 3.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double h = grid[i] - grid[i - 1];
        s.values[i] = s.values[i - 1] + 0.5 * (state.xi[i - 1] + state.xi[i]) * h -
                      (xxx[i - 1] + xxx[i]) * h * h * h / 24.0;
    }
    return s;
}

MetricState flat_state(std::shared_ptr<const Grid> grid) {
    MetricState st;
    const auto nodes = grid->nodes();
    st.b.assign(nodes.begin(), nodes.end());
    st.c = st.b;
    st.xi.assign(nodes.size(), 1.0);
    st.grid = std::move(grid);
    return st;
}

}  // namespace bergerflow
