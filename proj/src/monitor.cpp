#include "bergerflow/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <limits>
#include <map>

#include "bergerflow/errors.hpp"
#include "bergerflow/flow.hpp"

namespace bergerflow {

std::vector<std::pair<std::string, double>> monitor_fields(const MonitorReport& r) {
    return {
        {"t", r.t},
        {"rm_max", r.rm_max},
        {"ratio_min", r.ratio_min},
        {"ratio_max", r.ratio_max},
        {"ratio_min_node", static_cast<double>(r.ratio_min_node)},
        {"ratio_max_node", static_cast<double>(r.ratio_max_node)},
        {"min_bs", r.min_bs},
        {"min_bs_node", static_cast<double>(r.min_bs_node)},
        {"min_H", r.min_H},
        {"min_H_node", static_cast<double>(r.min_H_node)},
        {"sup_pos_phi4", r.sup_pos_phi4},
        {"sup_symm0", r.sup_symm0},
        {"sup_symm1", r.sup_symm1},
        {"sup_phi1", r.sup_phi1},
        {"sup_b2rm", r.sup_b2rm},
        {"sup_symm2", r.sup_symm2},
        {"min_clogc", r.min_clogc},
        {"min_blogb", r.min_blogb},
        {"sup_abs_bs", r.sup_abs_bs},
        {"sup_abs_cs", r.sup_abs_cs},
        {"sup_abs_H", r.sup_abs_H},
        {"min_cH", r.min_cH},
        {"sup_abs_cH", r.sup_abs_cH},
        {"sup_b", r.sup_b},
        {"cH_origin", r.cH_origin},
    };
}

MonitorReport monitor_from_fields(const std::vector<std::pair<std::string, double>>& fields) {
    std::map<std::string, double> m(fields.begin(), fields.end());
    auto get = [&](const std::string& k) {
        auto it = m.find(k);
        if (it == m.end()) throw SchemaError("monitor field missing: " + k);
        return it->second;
    };
    auto node = [&](const std::string& k) { return static_cast<std::size_t>(get(k)); };
    MonitorReport r;
    r.t = get("t");
    r.rm_max = get("rm_max");
    r.ratio_min = get("ratio_min");
    r.ratio_max = get("ratio_max");
    r.ratio_min_node = node("ratio_min_node");
    r.ratio_max_node = node("ratio_max_node");
    r.min_bs = get("min_bs");
    r.min_bs_node = node("min_bs_node");
    r.min_H = get("min_H");
    r.min_H_node = node("min_H_node");
    r.sup_pos_phi4 = get("sup_pos_phi4");
    r.sup_symm0 = get("sup_symm0");
    r.sup_symm1 = get("sup_symm1");
    r.sup_phi1 = get("sup_phi1");
    r.sup_b2rm = get("sup_b2rm");
    r.sup_symm2 = get("sup_symm2");
    r.min_clogc = get("min_clogc");
    r.min_blogb = get("min_blogb");
    r.sup_abs_bs = get("sup_abs_bs");
    r.sup_abs_cs = get("sup_abs_cs");
    r.sup_abs_H = get("sup_abs_H");
    r.min_cH = get("min_cH");
    r.sup_abs_cH = get("sup_abs_cH");
    r.sup_b = get("sup_b");
    r.cH_origin = get("cH_origin");
    return r;
}

MonitorReport monitor_report(const MetricState& state, const CurvatureField& cf, double lambda_total) {
    if (!(lambda_total > 0.0)) throw InvalidArgument("monitor_report: lambda_total must be positive");
    const std::size_t n = state.size();
    if (cf.size() != n) throw InvalidArgument("monitor_report: curvature field does not match the state");
    const double root = std::sqrt(lambda_total);
    const auto& d = cf.d;
    const double inf = std::numeric_limits<double>::infinity();

    MonitorReport r;
    r.t = state.t;
    r.rm_max = cf.rm_max * lambda_total;
    r.ratio_min = inf;
    r.ratio_max = -inf;
    r.min_bs = inf;
    r.min_H = inf;
    r.min_cH = inf;
    double min_clogc = inf;
    double min_blogb = inf;
    double sup_phi1 = -inf;
    for (std::size_t i = 0; i < n; ++i) {
        const double b = state.b[i];
        const double c = state.c[i];
        const double bs = d.bs[i];
        const double cs = d.cs[i];
        const double ratio = c / b;
        if (ratio < r.ratio_min) {
            r.ratio_min = ratio;
            r.ratio_min_node = i;
        }
        if (ratio > r.ratio_max) {
            r.ratio_max = ratio;
            r.ratio_max_node = i;
        }
        if (bs < r.min_bs) {
            r.min_bs = bs;
            r.min_bs_node = i;
        }
        if (cf.H[i] < r.min_H) {
            r.min_H = cf.H[i];
            r.min_H_node = i;
        }
        r.sup_pos_phi4 = std::max(r.sup_pos_phi4, (bs * bs - 4.0) / b);
        r.sup_symm0 = std::max(r.sup_symm0, (b / c - 1.0) / b);
        r.sup_symm1 = std::max(r.sup_symm1, std::abs(cs / c - bs / b));
        sup_phi1 = std::max(sup_phi1, (bs * bs - 1.0) / b);
        r.sup_b2rm = std::max(r.sup_b2rm, b * b * cf.rm_node[i]);
        r.sup_symm2 = std::max(r.sup_symm2, b * std::abs(cf.k01[i] - cf.k03[i]));
        const double c_phys = c / root;
        const double b_phys = b / root;
        if (c_phys < 1.0) min_clogc = std::min(min_clogc, d.css[i] * c * std::log(c_phys));
        if (b_phys < 1.0) min_blogb = std::min(min_blogb, d.bss[i] * b * std::log(b_phys));
        r.sup_abs_bs = std::max(r.sup_abs_bs, std::abs(bs));
        r.sup_abs_cs = std::max(r.sup_abs_cs, std::abs(cs));
        r.sup_abs_H = std::max(r.sup_abs_H, std::abs(cf.H[i]));
        r.min_cH = std::min(r.min_cH, c * cf.H[i]);
        r.sup_abs_cH = std::max(r.sup_abs_cH, std::abs(c * cf.H[i]));
        r.sup_b = std::max(r.sup_b, b);
    }
    r.min_H *= root;
    r.sup_pos_phi4 *= root;
    r.sup_symm0 *= root;
    r.sup_symm1 *= root;
    r.sup_phi1 = sup_phi1 * root;
    r.sup_symm2 *= root;
    r.sup_abs_H *= root;
    r.sup_b /= root;
    r.min_clogc = std::isfinite(min_clogc) ? min_clogc : 0.0;
    r.min_blogb = std::isfinite(min_blogb) ? min_blogb : 0.0;

    // c H is even across an origin: extrapolate in x^2 from the two innermost nodes.
    const Grid& grid = *state.grid;
    const double v0 = state.c[0] * cf.H[0];
    if (state.inner == InnerBoundary::Origin && n > 1) {
        const double v1 = state.c[1] * cf.H[1];
        const double u0 = grid[0] * grid[0];
        const double u1 = grid[1] * grid[1];
        r.cH_origin = (u1 * v0 - u0 * v1) / (u1 - u0);
    } else {
        r.cH_origin = v0;
    }
    return r;
}

void MonitorTolerances::validate() const {
    for (double v : {sign, ratio_upper, ratio_lower, sup_b, phi4_rate}) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("monitor tolerances must be finite and >= 0");
    }
}

MonotoneTracker::MonotoneTracker(InitialClass cls, double eps0, const MonitorTolerances& tol)
    : cls_(cls), eps0_(eps0), tol_(tol) {
    tol_.validate();
    if (!(eps0 > 0.0)) throw InvalidArgument("MonotoneTracker: eps0 must be positive");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> names{"ratio_upper", "ratio_lower"};
    if (cls == InitialClass::G || cls == InitialClass::GInf) {
        for (const char* n : {"min_bs", "min_H", "sup_pos_phi4"}) names.emplace_back(n);
        if (cls == InitialClass::G) names.emplace_back("sup_b");
    }
    for (const auto& n : names) verdicts_.push_back({n, true, nan, "", n.rfind("ratio", 0) == 0});
}

void MonotoneTracker::fail(std::size_t k, double t, std::string detail, std::vector<MonotoneVerdict>& fresh) {
    auto& v = verdicts_[k];
    if (!v.pass) return;
    v.pass = false;
    v.t_fail = t;
    v.detail = std::move(detail);
    fresh.push_back(v);
}

std::vector<MonotoneVerdict> MonotoneTracker::feed(const MonitorReport& r) {
    std::vector<MonotoneVerdict> fresh;
    if (r.ratio_max > 1.0 + tol_.ratio_upper) fail(0, r.t, "c/b reached " + std::to_string(r.ratio_max), fresh);
    if (r.ratio_min < eps0_ * (1.0 - tol_.ratio_lower)) {
        fail(1, r.t, "c/b fell to " + std::to_string(r.ratio_min), fresh);
    }
    if (verdicts_.size() > 2) {
        bs_scale_ = std::max(bs_scale_, r.sup_abs_bs);
        H_scale_ = std::max(H_scale_, r.sup_abs_cH);
        phi4_scale_ = std::max(phi4_scale_, r.sup_pos_phi4);
        if (r.min_bs < -tol_.sign * bs_scale_) fail(2, r.t, "b_s fell to " + std::to_string(r.min_bs), fresh);
        if (r.min_cH < -tol_.sign * H_scale_) fail(3, r.t, "c H fell to " + std::to_string(r.min_cH), fresh);
        if (started_) {
            const double dt = r.t - prev_.t;
            if (r.sup_pos_phi4 - prev_.sup_pos_phi4 > tol_.phi4_rate * phi4_scale_ * dt) {
                fail(4, r.t, "sup((b_s^2 - 4)/b)+ rose to " + std::to_string(r.sup_pos_phi4), fresh);
            }
        }
        if (verdicts_.size() > 5) {
            if (!started_) sup_b_floor_ = r.sup_b;
            if (r.sup_b > sup_b_floor_ * (1.0 + tol_.sup_b)) {
                fail(5, r.t, "sup b rose to " + std::to_string(r.sup_b), fresh);
            }
            sup_b_floor_ = std::min(sup_b_floor_, r.sup_b);
        }
    }
    prev_ = r;
    started_ = true;
    return fresh;
}

std::vector<MonotoneVerdict> check_monotone(const std::vector<MonitorReport>& history, InitialClass cls,
                                            double eps0, const MonitorTolerances& tol) {
    if (history.size() < 2) throw InvalidArgument("check_monotone needs at least two reports");
    MonotoneTracker tracker(cls, eps0, tol);
    for (const auto& r : history) tracker.feed(r);
    return tracker.verdicts();
}

namespace {

struct Jets {
    std::vector<double> b, c, b1, b2, c1, c2, k01, k03;
};

Jets jets(const MetricState& st) {
    const CurvatureField cf = curvature_field(st);
    return {st.b, st.c, cf.d.bs, cf.d.bss, cf.d.cs, cf.d.css, cf.k01, cf.k03};
}

struct Quantity {
    std::string name;
    bool odd_at_mirror;
    std::function<double(const Jets&, std::size_t)> value;
};

const std::vector<Quantity>& quantities() {
    static const std::vector<Quantity> q{
        {"log_c_over_b", false, [](const Jets& j, std::size_t i) { return std::log(j.c[i] / j.b[i]); }},
        {"c_over_b_bs", true, [](const Jets& j, std::size_t i) { return j.c[i] / j.b[i] * j.b1[i]; }},
        {"cH", true,
         [](const Jets& j, std::size_t i) { return j.c[i] * (2.0 * j.b1[i] / j.b[i] + j.c1[i] / j.c[i]); }},
        {"bs", true, [](const Jets& j, std::size_t i) { return j.b1[i]; }},
        {"cs", true, [](const Jets& j, std::size_t i) { return j.c1[i]; }},
        {"k01", false, [](const Jets& j, std::size_t i) { return j.k01[i]; }},
        {"k03", false, [](const Jets& j, std::size_t i) { return j.k03[i]; }},
    };
    return q;
}

// Right-hand side of the evolution equation of quantity q at node i, given Q_s and Q_ss.
double identity_rhs(std::size_t q, const Jets& j, std::size_t i, double Qs, double Qss) {
    const double b = j.b[i], c = j.c[i], b1 = j.b1[i], c1 = j.c1[i];
    const double b2 = b * b, b4 = b2 * b2, c2 = c * c;
    const double H = 2.0 * b1 / b + c1 / c;
    const double lap = Qss + H * Qs;
    const double drift = Qs * (2.0 * b1 / b - c1 / c);
    const double X = c / b * b1;
    const double k01 = j.k01[i], k03 = j.k03[i];
    switch (q) {
        case 0:
            return lap + 4.0 / b2 * (1.0 - c2 / b2);
        case 1:
            return Qss + drift + X / b2 * (8.0 - 10.0 * c2 / b2 - 2.0 * b1 * b1) + 4.0 * c2 / b4 * c1;
        case 2: {
            const double Y = c * H;
            return Qss + drift + 2.0 * Y / b2 * (c2 / b2 - b1 * b1) + 16.0 / b2 * X * (1.0 - c2 / b2);
        }
        case 3:
            return lap - 2.0 * b1 / b * Qs +
                   (4.0 / b2 - b1 * b1 / b2 - c1 * c1 / c2 - 6.0 * c2 / b4) * b1 + 4.0 * c / (b2 * b) * c1;
        case 4:
            return lap - 2.0 * c1 / c * Qs - (6.0 * c2 / b4 + 2.0 * b1 * b1 / b2) * c1 + 8.0 * c2 * c / (b4 * b) * b1;
        case 5:
            return lap + 2.0 * k01 * k01 +
                   k01 * (8.0 / b2 - 8.0 * c2 / b4 - 2.0 * c1 * c1 / c2 - 4.0 * b1 * b1 / b2) +
                   k03 * (4.0 * c2 / b4 - 2.0 * b1 * c1 / (b * c)) - 4.0 * c1 * c1 / b4 +
                   24.0 * c * b1 * c1 / (b4 * b) - 2.0 * b1 * c1 * c1 * c1 / (b * c2 * c) -
                   24.0 * c2 * b1 * b1 / (b4 * b2) + 8.0 * b1 * b1 / b4 - 2.0 * b1 * b1 * b1 * b1 / b4;
        default:
            return lap + 2.0 * k03 * k03 - 4.0 * k03 * (b1 * b1 / b2 + c2 / b4) +
                   4.0 * k01 * (2.0 * c2 / b4 - b1 * c1 / (b * c)) + 12.0 * c1 * c1 / b4 +
                   40.0 * c2 * b1 * b1 / (b4 * b2) - 48.0 * c * b1 * c1 / (b4 * b) -
                   4.0 * b1 * b1 * b1 * c1 / (b2 * b * c);
    }
}

}  // namespace

std::vector<IdentityResidual> verify_evolution_identities(const IdentityWindow& window) {
    const auto& states = window.states;
    if (states.size() < 3) throw InvalidArgument("identity window needs at least 3 states");
    const auto& grid_ptr = states.front().grid;
    for (const auto& st : states) {
        if (!st.grid || (st.grid != grid_ptr && st.grid->nodes().size() != grid_ptr->nodes().size())) {
            throw InvalidArgument("identity window spans a regrid");
        }
        if (st.grid != grid_ptr && !std::equal(st.grid->nodes().begin(), st.grid->nodes().end(),
                                               grid_ptr->nodes().begin())) {
            throw InvalidArgument("identity window spans a regrid");
        }
    }
    const std::size_t mid = states.size() / 2;
    const MetricState& first = states[mid - 1];
    const MetricState& centre = states[mid];
    const MetricState& last = states[mid + 1];
    const double dt = last.t - first.t;
    if (!(dt > 0.0)) throw InvalidArgument("identity window times must increase");

    const Jets j0 = jets(first), j1 = jets(centre), j2 = jets(last);
    const OriginShift shift = origin_shift(centre);
    const std::size_t n = centre.size();
    const std::size_t stop = n - std::max<std::size_t>(1, n / 10);
    // Near the inner end the right-hand sides are sums of terms of size 1/s^4 that cancel; their
    // pointwise error does not shrink under refinement at a fixed node index, so skip the inner tenth too.
    const std::size_t start = n / 10;
    const bool mirror = centre.inner == InnerBoundary::Mirror;

    std::vector<IdentityResidual> out;
    const auto& qs = quantities();
    for (std::size_t q = 0; q < qs.size(); ++q) {
        RadialField Q{std::vector<double>(n), mirror && qs[q].odd_at_mirror ? Parity::Odd : Parity::Even};
        for (std::size_t i = 0; i < n; ++i) Q.values[i] = qs[q].value(j1, i);
        const RadialField Qs = deriv_s(Q, centre, 1);
        const RadialField Qss = deriv_s(Q, centre, 2);
        IdentityResidual res{qs[q].name, 0.0, 0, 0.0};
        for (std::size_t i = start; i < stop; ++i) {
            const double rate = (qs[q].value(j2, i) - qs[q].value(j0, i)) / dt;
            const double lhs = rate - shift.v[i] * centre.xi[i] * Qs[i];
            const double r = std::abs(lhs - identity_rhs(q, j1, i, Qs[i], Qss[i]));
            res.scale = std::max(res.scale, std::abs(lhs));
            if (r > res.residual || !std::isfinite(r)) {
                res.residual = r;
                res.node = i;
            }
        }
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace bergerflow
