#include "bergerflow/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "bergerflow/errors.hpp"
#include "bergerflow/interpolation.hpp"

namespace bergerflow {

void StepControl::validate() const {
    if (!(cfl_factor > 0.0) || !(curvature_factor > 0.0) || !(dt_min > 0.0) || !(dt_max > 0.0)) {
        throw InvalidArgument("step control parameters must be positive");
    }
    if (!(dt_min < dt_max)) throw InvalidArgument("step control requires dt_min < dt_max");
    if (max_retries < 0) throw InvalidArgument("step control max_retries must be >= 0");
}

namespace {

// Variables advanced by the stepper. At an origin the fiber ratio is carried
// as m = log(c/b) / x^2 and the radial factor as p = log(x xi / b) / x^2, so
// that b_s -> 1 and c_s -> 1 hold by construction. With a mirror inner end u
// is c itself and p is ln xi.
struct Evolved {
    std::vector<double> b;
    std::vector<double> u;
    std::vector<double> p;
};

Evolved to_evolved(const MetricState& st) {
    const Grid& grid = *st.grid;
    const std::size_t n = st.size();
    Evolved e{st.b, std::vector<double>(n), std::vector<double>(n)};
    const bool origin = st.inner == InnerBoundary::Origin;
    for (std::size_t i = 0; i < n; ++i) {
        const double x2 = grid[i] * grid[i];
        e.p[i] = origin ? std::log(grid[i] * st.xi[i] / st.b[i]) / x2 : std::log(st.xi[i]);
        e.u[i] = origin ? std::log1p((st.c[i] - st.b[i]) / st.b[i]) / x2 : st.c[i];
    }
    return e;
}

void from_evolved(const Evolved& e, MetricState& st) {
    const Grid& grid = *st.grid;
    const bool origin = st.inner == InnerBoundary::Origin;
    for (std::size_t i = 0; i < st.size(); ++i) {
        const double x2 = grid[i] * grid[i];
        st.b[i] = e.b[i];
        st.xi[i] = origin ? e.b[i] / grid[i] * std::exp(x2 * e.p[i]) : std::exp(e.p[i]);
        st.c[i] = origin ? e.b[i] * std::exp(x2 * e.u[i]) : e.u[i];
    }
}

// (expm1(y) - y) / y^2 without cancellation for small y.
double expm1_excess(double y) {
    if (std::abs(y) < 1e-3) return 0.5 + y / 6.0 + y * y / 24.0;
    return (std::expm1(y) - y) / (y * y);
}

// Geometric time derivatives at fixed x plus the pieces the shift needs.
struct Kernel {
    std::vector<double> B;   // b_t
    std::vector<double> U;   // u_t
    std::vector<double> L;   // (ln xi)_t
    std::vector<double> K;   // B/b - L = k01 + k03 - k12 - k13
    std::vector<double> bx;  // db/dx
    std::vector<double> ux;  // du/dx along a shift (m: f_x / x^2)
    std::vector<double> lx;  // d(ln xi)/dx
    std::vector<double> px;  // dp/dx along a shift (origin: D_x / x^2 with D = x^2 p)
};

void check_finite(const Kernel& k, std::size_t i, const Grid& grid) {
    if (!std::isfinite(k.B[i]) || !std::isfinite(k.U[i]) || !std::isfinite(k.L[i])) {
        throw NumericalBreakdown("non-finite flow right-hand side", i, grid[i]);
    }
}

Kernel kernel(const MetricState& st, const Evolved& e) {
    const Grid& grid = *st.grid;
    const std::size_t n = st.size();
    Kernel k{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
             std::vector<double>(n, 0.0), std::vector<double>(n), std::vector<double>(n),
             std::vector<double>(n), std::vector<double>(n)};

    if (st.inner == InnerBoundary::Mirror) {
        diff_x1(grid, e.p, Parity::Even, k.lx);
        k.px = k.lx;
        std::vector<double> bxx(n), cxx(n);
        diff_x1(grid, e.b, Parity::Even, k.bx);
        diff_x2(grid, e.b, Parity::Even, bxx);
        diff_x1(grid, e.u, Parity::Even, k.ux);
        diff_x2(grid, e.u, Parity::Even, cxx);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double xi = st.xi[i];
            const double b = e.b[i];
            const double c = e.u[i];
            const double bs = k.bx[i] / xi;
            const double cs = k.ux[i] / xi;
            const double bss = (bxx[i] - k.lx[i] * k.bx[i]) / (xi * xi);
            const double css = (cxx[i] - k.lx[i] * k.ux[i]) / (xi * xi);
            const double b2 = b * b;
            k.B[i] = bss + (cs / c + bs / b) * bs + 2.0 * (c * c - 2.0 * b2) / (b2 * b);
            k.U[i] = css + 2.0 * (bs / b) * cs - 2.0 * c * c * c / (b2 * b2);
            k.L[i] = 2.0 * bss / b + css / c;
            k.K[i] = k.B[i] / b - k.L[i];
            check_finite(k, i, grid);
        }
        return k;
    }

    // Origin: b = x F and c = b exp(x^2 m) with F, m even, so every 1/x and
    // 1/x^2 factor below multiplies a quantity that vanishes to that order.
    std::vector<double> F(n), Fx(n), Fxx(n), mx(n), mxx(n), px(n);
    for (std::size_t i = 0; i < n; ++i) F[i] = e.b[i] / grid[i];
    diff_x1(grid, F, Parity::Even, Fx);
    diff_x2(grid, F, Parity::Even, Fxx);
    diff_x1(grid, e.u, Parity::Even, mx);
    diff_x2(grid, e.u, Parity::Even, mxx);
    diff_x1(grid, e.p, Parity::Even, px);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid[i];
        const double m = e.u[i];
        k.bx[i] = F[i] + x * Fx[i];
        k.ux[i] = 2.0 * m / x + mx[i];
        k.px[i] = 2.0 * e.p[i] / x + px[i];
        k.lx[i] = Fx[i] / F[i] + x * x * k.px[i];
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double x = grid[i];
        const double xi = st.xi[i];
        const double xi2 = xi * xi;
        const double b = e.b[i];
        const double m = e.u[i];
        const double lx = k.lx[i];
        const double D = x * x * e.p[i];
        const double bs = k.bx[i] / xi;
        const double bs_m1 = std::expm1(-D) + x * Fx[i] / xi;
        const double bxx = 2.0 * Fx[i] + x * Fxx[i];
        const double bss = (bxx - lx * k.bx[i]) / xi2;
        const double f = x * x * m;
        const double fs = x * (2.0 * m + x * mx[i]) / xi;
        const double fxx = 2.0 * m + 4.0 * x * mx[i] + x * x * mxx[i];
        const double fss = (fxx - lx * x * (2.0 * m + x * mx[i])) / xi2;
        const double bs_b = bs / b;

        k.B[i] = bss + 2.0 * bs_m1 * (bs + 1.0) / b + fs * bs + 2.0 * std::expm1(2.0 * f) / b;
        const double css_c = bss / b + 2.0 * bs_b * fs + fss + fs * fs;
        k.L[i] = 2.0 * bss / b + css_c;
        k.K[i] = k.B[i] / b - k.L[i];
        k.U[i] = (mxx[i] + 4.0 * mx[i] / x - lx * k.ux[i]) / xi2 + 3.0 * bs_b * mx[i] / xi +
                 6.0 * m * Fx[i] / (x * xi2 * F[i]) + fs * k.ux[i] / xi -
                 8.0 * m * std::expm1(2.0 * D) / (x * x * xi2) -
                 16.0 * m * m * expm1_excess(2.0 * f) / (F[i] * F[i]);
        check_finite(k, i, grid);
    }
    return k;
}

}  // namespace

FlowRhs rhs(const MetricState& state) {
    const std::size_t n = state.size();
    const Parity p = state.orbit_parity();
    const Evolved e = to_evolved(state);
    const Kernel k = kernel(state, e);
    FlowRhs out{{k.B, p}, {std::vector<double>(n, 0.0), p}, {k.L, Parity::Even}};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (state.inner == InnerBoundary::Mirror) {
            out.dc.values[i] = k.U[i];
        } else {
            const double x = (*state.grid)[i];
            out.dc.values[i] = state.c[i] * (k.B[i] / state.b[i] + x * x * k.U[i]);
        }
    }
    return out;
}

double gauge_radius(const Grid& grid) { return grid[std::min<std::size_t>(8, grid.size() / 4)]; }

namespace {

double origin_cutoff(double x, double xc) {
    if (x <= xc) return 1.0;
    if (x >= 2.0 * xc) return 0.0;
    return 0.5 * (1.0 + std::cos(M_PI * (x - xc) / xc));
}

OriginShift shift_from(const Grid& grid, InnerBoundary inner, const std::vector<double>& K) {
    const std::size_t n = grid.size();
    OriginShift sh{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    if (inner != InnerBoundary::Origin) return sh;
    const double xc = gauge_radius(grid);
    std::vector<double> integrand(n, 0.0), chi_k(n, 0.0);
    std::size_t last = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double x = grid[i];
        if (x >= 2.0 * xc) break;
        const double chi = origin_cutoff(x, xc);
        chi_k[i] = chi * K[i];
        integrand[i] = chi_k[i] / x;
        last = i;
    }
    // w vanishes beyond node `last`; integrate inward with the trapezoid rule.
    double w = 0.0;
    for (std::size_t j = last + 1; j-- > 0;) {
        w -= 0.5 * (integrand[j] + integrand[j + 1]) * (grid[j + 1] - grid[j]);
        sh.v[j] = grid[j] * w;
        sh.v_x[j] = w + chi_k[j];
    }
    return sh;
}

struct Tendency {
    std::vector<double> b;
    std::vector<double> u;
    std::vector<double> p;
};

// Fourth undivided difference over the local cell size squared, an O(h^2)
// term that damps the odd-even mode the gauge equation cannot see. It acts on
// ln xi with a mirror inner end and on p at an origin.
std::vector<double> gauge_dissipation(const MetricState& st, const std::vector<double>& g) {
    const Grid& grid = *st.grid;
    const std::size_t n = st.size();
    std::vector<double> out(n, 0.0);
    auto at = [&](std::ptrdiff_t j) {
        return j < 0 ? g[static_cast<std::size_t>(-j - 1)] : g[static_cast<std::size_t>(j)];
    };
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const auto j = static_cast<std::ptrdiff_t>(i);
        const double d4 = at(j - 2) - 4.0 * at(j - 1) + 6.0 * at(j) - 4.0 * at(j + 1) + at(j + 2);
        const double h = st.xi[i] * (grid[i + 1] - grid[i]);
        out[i] = -kGaugeDissipation * d4 / (h * h);
    }
    return out;
}

Tendency tendency(const MetricState& st, const Evolved& e) {
    Kernel k = kernel(st, e);
    const std::vector<double> diss = gauge_dissipation(st, e.p);
    const OriginShift sh = shift_from(*st.grid, st.inner, k.K);
    const std::size_t n = st.size();
    if (st.inner == InnerBoundary::Mirror) {
        for (std::size_t i = 0; i + 1 < n; ++i) k.L[i] += diss[i];
        return {std::move(k.B), std::move(k.U), std::move(k.L)};
    }
    // D = x^2 p moves with the shift and, outside the gauge region, by -K:
    // D_t = -(1 - chi) K + v D_x.
    const Grid& grid = *st.grid;
    const double xc = gauge_radius(grid);
    std::vector<double> dp(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double x = grid[i];
        const double x2 = x * x;
        dp[i] = sh.v[i] * k.px[i] + (origin_cutoff(x, xc) - 1.0) * k.K[i] / x2 + diss[i];
        k.B[i] += sh.v[i] * k.bx[i];
        k.U[i] += sh.v[i] * k.ux[i];
    }
    return {std::move(k.B), std::move(k.U), std::move(dp)};
}

}  // namespace

OriginShift origin_shift(const MetricState& state) {
    const Kernel k = kernel(state, to_evolved(state));
    return shift_from(*state.grid, state.inner, k.K);
}

double min_cell(const MetricState& state) {
    const Grid& grid = *state.grid;
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) h = std::min(h, state.xi[i] * (grid[i + 1] - grid[i]));
    return h;
}

double select_dt(const MetricState& state, const CurvatureField& cf, const StepControl& ctl) {
    const double h = min_cell(state);
    double dt = ctl.cfl_factor * h * h;
    if (cf.rm_max > 0.0) dt = std::min(dt, ctl.curvature_factor / cf.rm_max);
    if (dt < ctl.dt_min) throw ResolutionExhausted("resolution exhausted: dt below dt_min", dt);
    return std::min(dt, ctl.dt_max);
}

namespace {

void check_stage(const MetricState& s) {
    const Grid& grid = *s.grid;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s.b[i] > 0.0) || !(s.c[i] > 0.0) || !(s.xi[i] > 0.0) || !std::isfinite(s.b[i]) ||
            !std::isfinite(s.c[i]) || !std::isfinite(s.xi[i])) {
            throw NumericalBreakdown("positivity lost during step", i, grid[i]);
        }
    }
}

}  // namespace

MetricState heun_step(const MetricState& state, double dt) {
    const std::size_t n = state.size();
    const Evolved e0 = to_evolved(state);
    const Tendency k1 = tendency(state, e0);
    Evolved e1 = e0;
    for (std::size_t i = 0; i < n; ++i) {
        e1.b[i] += dt * k1.b[i];
        e1.u[i] += dt * k1.u[i];
        e1.p[i] += dt * k1.p[i];
    }
    MetricState mid = state;
    mid.t = state.t + dt;
    from_evolved(e1, mid);
    check_stage(mid);
    const Tendency k2 = tendency(mid, e1);
    Evolved e2 = e0;
    const double h = 0.5 * dt;
    for (std::size_t i = 0; i < n; ++i) {
        e2.b[i] += h * (k1.b[i] + k2.b[i]);
        e2.u[i] += h * (k1.u[i] + k2.u[i]);
        e2.p[i] += h * (k1.p[i] + k2.p[i]);
    }
    MetricState out = state;
    out.t = state.t + dt;
    from_evolved(e2, out);
    check_stage(out);
    return out;
}

FlowState step(FlowState flow, const StepControl& ctl) {
    const CurvatureField cf = curvature_field(flow.state);
    return step(std::move(flow), ctl, cf);
}

FlowState step(FlowState flow, const StepControl& ctl, const CurvatureField& cf) {
    const auto start = std::chrono::steady_clock::now();
    double dt = select_dt(flow.state, cf, ctl);
    for (int attempt = 0;; ++attempt) {
        try {
            flow.state = heun_step(flow.state, dt);
            break;
        } catch (const NumericalBreakdown&) {
            if (attempt >= ctl.max_retries) throw;
            dt *= 0.5;
        }
    }
    flow.step_count += 1;
    flow.dt_history.push_back(dt);
    flow.wall_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return flow;
}

std::vector<double> clustered_nodes(std::size_t n, double s_last, double s_peak, double h_peak) {
    if (n < 16 || !(s_last > 0.0) || !(h_peak > 0.0)) {
        throw InvalidArgument("clustered_nodes: need n >= 16, s_last > 0, h_peak > 0");
    }
    s_peak = std::clamp(s_peak, 0.0, s_last);
    const double units = static_cast<double>(n) - 0.5;
    std::vector<double> nodes(n);
    if (s_last / h_peak <= units) {
        // Fewer nodes needed than available: uniform staggered spacing.
        const double h = s_last / units;
        for (std::size_t i = 0; i < n; ++i) nodes[i] = (static_cast<double>(i) + 0.5) * h;
        nodes.back() = s_last;
        return nodes;
    }
    // Integral of 1/h from 0 to s for a given gamma.
    auto count = [&](double gamma, double s) {
        auto side = [&](double d) { return std::log1p(gamma * d / h_peak) / gamma; };
        return s <= s_peak ? side(s_peak) - side(s_peak - s) : side(s_peak) + side(s - s_peak);
    };
    double lo = 1e-12;
    double hi = 1.0;
    while (count(hi, s_last) > units) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (count(mid, s_last) > units ? lo : hi) = mid;
    }
    const double gamma = hi;
    const double total = count(gamma, s_last);
    const double a = count(gamma, s_peak);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = total * (static_cast<double>(i) + 0.5) / units;
        const double u = m - a;
        const double off = h_peak * std::expm1(gamma * std::abs(u)) / gamma;
        nodes[i] = u < 0.0 ? s_peak - off : s_peak + off;
    }
    nodes.back() = s_last;
    return nodes;
}

std::vector<double> clustered_nodes(std::size_t n, double s_last, double s_peak, double h_peak,
                                    const std::function<double(double)>& cap) {
    // Node density 1 / min(h_peak + gamma |s - s_peak|, cap(s)) integrated on a
    // reference grid that resolves both terms; gamma is set so the total count is n.
    s_peak = std::clamp(s_peak, 0.0, s_last);
    std::vector<double> ref{0.0};
    std::vector<double> limit{std::max(cap(0.0), h_peak)};
    while (ref.back() < s_last) {
        const double here = ref.back();
        const double ds = std::min(h_peak + std::abs(here - s_peak), limit.back()) / 16.0;
        const double next = std::min(here + ds, s_last);
        ref.push_back(next);
        limit.push_back(std::max(cap(next), h_peak));
    }

    std::vector<double> cum(ref.size(), 0.0);
    auto integrate = [&](double gamma) {
        double prev = 0.0;
        for (std::size_t j = 0; j < ref.size(); ++j) {
            const double rho = 1.0 / std::min(h_peak + gamma * std::abs(ref[j] - s_peak), limit[j]);
            if (j > 0) cum[j] = cum[j - 1] + 0.5 * (rho + prev) * (ref[j] - ref[j - 1]);
            prev = rho;
        }
        return cum.back();
    };

    const double units = static_cast<double>(n) - 0.5;
    double total = integrate(0.0);
    if (total > units) {
        double lo = 0.0;
        double hi = 1.0;
        while (integrate(hi) > units && hi < 1e12) hi *= 2.0;
        if (integrate(hi) > units) {
            // Only the cap binds: place as many nodes as it asks for.
            n = static_cast<std::size_t>(std::ceil(integrate(1e300) + 0.5));
        } else {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (integrate(mid) > units ? lo : hi) = mid;
            }
            integrate(hi);
        }
        total = cum.back();
    } else {
        integrate(0.0);
    }

    const double used = static_cast<double>(n) - 0.5;
    std::vector<double> nodes(n);
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = total * (static_cast<double>(i) + 0.5) / used;
        while (j + 1 < cum.size() && cum[j] < m) ++j;
        const double w = (m - cum[j - 1]) / (cum[j] - cum[j - 1]);
        nodes[i] = ref[j - 1] + std::clamp(w, 0.0, 1.0) * (ref[j] - ref[j - 1]);
    }
    nodes.back() = s_last;
    return nodes;
}

FlowState rescale_continue(const FlowState& flow, double zoom, const RegridPolicy& policy) {
    if (!(zoom >= 1.0) || !std::isfinite(zoom)) throw InvalidArgument("rescale zoom must be >= 1");
    if (!(policy.cells_per_radius > 0.0)) throw InvalidArgument("cells_per_radius must be positive");
    const MetricState& old = flow.state;
    const std::size_t n_old = old.size();
    std::size_t n = policy.n_nodes == 0 ? n_old : policy.n_nodes;
    const CurvatureField cf = curvature_field(old);
    const RadialField s = arclength_corrected(old);
    const double root = std::sqrt(zoom);

    const double s_last = s.values.back();
    const double rm_new = cf.rm_max / zoom;
    double h_peak = 1.0 / policy.nodes_per_unit;
    if (rm_new > 1.0) h_peak /= std::sqrt(rm_new);

    // With an origin inner end b / s and c / s are interpolated as functions of
    // s^2, anchored by their common limit 1 at the origin. A mirror end uses b
    // and c against s with an even ghost at -s[0].
    const bool quotient = old.inner == InnerBoundary::Origin;
    std::vector<double> sx(n_old + 1), bx(n_old + 1), cx(n_old + 1);
    for (std::size_t i = 0; i < n_old; ++i) {
        sx[i + 1] = quotient ? s[i] * s[i] : s[i];
        bx[i + 1] = quotient ? old.b[i] / s[i] : old.b[i];
        cx[i + 1] = quotient ? old.c[i] / s[i] : old.c[i];
    }
    sx[0] = quotient ? 0.0 : -s[0];
    bx[0] = quotient ? 1.0 : bx[1];
    cx[0] = quotient ? 1.0 : cx[1];
    const MonotoneInterpolant bi(sx, bx);
    const MonotoneInterpolant ci(std::move(sx), cx);
    auto b_new = [&](double y) {
        const double so = std::min(y / root, s_last);
        return quotient ? root * so * bi(so * so) : root * bi(so);
    };
    std::vector<double> y =
        clustered_nodes(n, root * s_last, root * s[cf.rm_argmax], h_peak,
                        [&](double y) { return b_new(y) / policy.cells_per_radius; });
    n = y.size();

    FlowState next;
    MetricState& st = next.state;
    st.inner = old.inner;
    st.t = 0.0;
    st.b.resize(n);
    st.c.resize(n);
    st.xi.assign(n, 1.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double so = std::min(y[i] / root, s_last);
        const double q = quotient ? so : 1.0;
        const double at = quotient ? so * so : so;
        st.b[i] = root * q * bi(at);
        st.c[i] = root * q * ci(at);
    }
    st.b.back() = root * old.b.back();
    st.c.back() = root * old.c.back();
    const double x_max = y.back() + 0.5 * (y[n - 1] - y[n - 2]);
    st.grid = std::make_shared<const Grid>(Grid::from_nodes(std::move(y), x_max, 1.0));
    st.validate();

    next.step_count = flow.step_count;
    next.rescale_count = flow.rescale_count + (zoom > 1.0 ? 1 : 0);
    next.regrid_count = flow.regrid_count + (zoom > 1.0 ? 0 : 1);
    next.t_offset = flow.physical_time();
    next.lambda_total = flow.lambda_total * zoom;
    next.wall_seconds = flow.wall_seconds;
    next.dt_history = flow.dt_history;
    return next;
}

}  // namespace bergerflow
