#include "bergerflow/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bergerflow/errors.hpp"

namespace bergerflow {

std::string method_name(TMethod m) {
    switch (m) {
        case TMethod::LinearInverseRm:
            return "linear-1/rm";
        case TMethod::LinearB2:
            return "linear-b2";
        default:
            return "none";
    }
}

std::string type_verdict_name(TypeVerdict v) {
    switch (v) {
        case TypeVerdict::TypeI:
            return "TypeI";
        case TypeVerdict::TypeIIIndicated:
            return "TypeII-indicated";
        default:
            return "undetermined";
    }
}

namespace {

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double root = std::numeric_limits<double>::quiet_NaN();
    double root_error = std::numeric_limits<double>::quiet_NaN();
};

// Least squares y = intercept + slope t; root where y = 0 and its standard error.
LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    LineFit f;
    if (n < 3) return f;
    double tm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tm += t[i];
        ym += y[i];
    }
    tm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
    }
    if (!(stt > 0.0)) return f;
    f.slope = sty / stt;
    f.intercept = ym - f.slope * tm;
    if (!(f.slope < 0.0)) return f;
    f.root = -f.intercept / f.slope;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * t[i];
        ss += r * r;
    }
    const double s2 = ss / static_cast<double>(n - 2);
    // Variance of the root -a/b through the covariance of (a, b).
    const double var_b = s2 / stt;
    const double var_a = s2 * (1.0 / static_cast<double>(n) + tm * tm / stt);
    const double cov_ab = -tm * s2 / stt;
    const double da = -1.0 / f.slope;
    const double db = f.intercept / (f.slope * f.slope);
    f.root_error = std::sqrt(std::max(0.0, da * da * var_a + db * db * var_b + 2.0 * da * db * cov_ab));
    return f;
}

}  // namespace

SingularityEstimate estimate_T(const std::vector<SeriesSample>& series) {
    SingularityEstimate est;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    est.T_inverse_rm = nan;
    est.T_b2 = nan;
    if (series.size() < 20) return est;
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (!(series[i].t > series[i - 1].t)) throw InvalidArgument("estimate_T: times must increase");
    }
    const double rm_first = series.front().rm_max;
    const double rm_last = series.back().rm_max;
    if (!(rm_first > 0.0) || !(rm_last >= 1e3 * rm_first)) return est;

    std::size_t begin = series.size() - 1;
    while (begin > 0 && series[begin - 1].rm_max >= rm_last / 10.0) --begin;
    // A decade reached through a single late jump still needs enough points to fit.
    begin = std::min(begin, series.size() - 3);
    est.fit_begin = begin;

    std::vector<double> t, inv_rm, b2;
    for (std::size_t i = begin; i < series.size(); ++i) {
        t.push_back(series[i].t);
        inv_rm.push_back(1.0 / series[i].rm_max);
        b2.push_back(series[i].b2_peak);
    }
    const LineFit frm = fit_line(t, inv_rm);
    const LineFit fb2 = fit_line(t, b2);
    est.T_inverse_rm = frm.root;
    est.T_b2 = fb2.root;

    const double t_last = series.back().t;
    const bool rm_ok = std::isfinite(frm.root) && frm.root > t_last;
    const bool b2_ok = std::isfinite(fb2.root) && fb2.root > t_last;
    const double floor = 1e-9 * std::max(1.0, std::abs(t_last));
    if (b2_ok && rm_ok && std::abs(fb2.root - frm.root) <= 0.2 * std::abs(frm.root)) {
        est.method = TMethod::LinearB2;
        est.T_est = fb2.root;
        est.uncertainty = std::max({fb2.root_error, 0.5 * std::abs(fb2.root - frm.root), floor});
    } else if (rm_ok) {
        est.method = TMethod::LinearInverseRm;
        est.T_est = frm.root;
        est.uncertainty = 2.0 * std::max(frm.root_error, floor);
    } else {
        return est;
    }
    est.singular = true;
    for (const auto& s : series) {
        est.N_series.emplace_back(s.t, (est.T_est - s.t) * s.rm_max);
        est.rm_series.push_back(s.rm_max);
    }
    return est;
}

void TypeThresholds::validate() const {
    if (!(type_one >= 0.0) || !(type_two < -type_one) || !(decades >= 1.0)) {
        throw InvalidArgument("type thresholds need type_one >= 0, type_two < -type_one, decades >= 1");
    }
}

TypeClassification classify_type(const SingularityEstimate& est, const TypeThresholds& th) {
    th.validate();
    TypeClassification out;
    if (!est.singular || est.N_series.size() < 3) return out;
    const double rm_last = est.rm_series.back();
    const double rm_floor = rm_last / std::pow(10.0, th.decades);
    std::vector<double> lx, ly;
    double rm_lo = rm_last;
    for (std::size_t i = 0; i < est.N_series.size(); ++i) {
        const auto [t, N] = est.N_series[i];
        if (est.rm_series[i] < rm_floor || !(N > 0.0)) continue;
        lx.push_back(std::log(est.T_est - t));
        ly.push_back(std::log(N));
        rm_lo = std::min(rm_lo, est.rm_series[i]);
    }
    out.samples = lx.size();
    out.decades_used = std::log10(rm_last / rm_lo);
    if (out.decades_used < 1.0 || lx.size() < 3) return out;

    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        xm += lx[i];
        ym += ly[i];
    }
    xm /= static_cast<double>(lx.size());
    ym /= static_cast<double>(lx.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - xm) * (lx[i] - xm);
        sxy += (lx[i] - xm) * (ly[i] - ym);
    }
    if (!(sxx > 0.0)) return out;
    out.slope = sxy / sxx;
    if (std::abs(out.slope) <= th.type_one) {
        out.verdict = TypeVerdict::TypeI;
    } else if (out.slope <= th.type_two) {
        out.verdict = TypeVerdict::TypeIIIndicated;
    }
    return out;
}

BlowupFrame blowup_frame(const MetricState& state, const CurvatureField& cf, bool at_origin, double sigma_max) {
    if (!(sigma_max > 0.0)) throw InvalidArgument("blowup_frame: sigma_max must be positive");
    if (cf.size() != state.size()) throw InvalidArgument("blowup_frame: curvature field does not match the state");
    BlowupFrame fr;
    fr.at_origin = at_origin;
    fr.base = at_origin ? 0 : cf.rm_argmax;
    fr.t_frame = state.t;
    fr.lambda = cf.R[fr.base];
    if (!(fr.lambda > 0.0)) {
        throw InvalidArgument("blowup_frame: scalar curvature at the base is not positive");
    }
    fr.dbdsigma_base = cf.d.bs[fr.base];
    const RadialField s = arclength(state);
    const double root = std::sqrt(fr.lambda);
    const double s_base = at_origin ? 0.0 : s[fr.base];
    for (std::size_t i = fr.base; i < state.size(); ++i) {
        const double sigma = root * (s[i] - s_base);
        if (sigma > sigma_max) break;
        fr.sigma.push_back(sigma);
        fr.b_tilde.push_back(root * state.b[i]);
        fr.c_tilde.push_back(root * state.c[i]);
    }
    return fr;
}

ProfileDistance compare_profile(const BlowupFrame& frame, const Profile& oracle, double sigma_cmp) {
    if (!(sigma_cmp > 0.0)) throw InvalidArgument("compare_profile: sigma_cmp must be positive");
    if (frame.sigma.empty() || frame.sigma.back() < sigma_cmp) {
        throw InvalidArgument("compare_profile: frame does not reach sigma_cmp");
    }
    if (oracle.sigma_max() < sigma_cmp) throw InvalidArgument("compare_profile: oracle does not reach sigma_cmp");
    ProfileDistance d;
    d.sigma_cmp = sigma_cmp;
    for (std::size_t i = 0; i < frame.sigma.size() && frame.sigma[i] <= sigma_cmp; ++i) {
        const double phi = oracle.phi_at(frame.sigma[i]);
        const double w = std::max(phi, 0.1);
        d.b_distance = std::max(d.b_distance, std::abs(frame.b_tilde[i] - phi) / w);
        d.c_distance = std::max(d.c_distance, std::abs(frame.c_tilde[i] - phi) / w);
        d.rotational_defect = std::max(d.rotational_defect, std::abs(frame.b_tilde[i] / frame.c_tilde[i] - 1.0));
    }
    d.distance = std::max(d.b_distance, d.c_distance);
    return d;
}

std::vector<MinimalSphere> detect_minimal_spheres(const MetricState& state, const CurvatureField& cf) {
    if (cf.size() != state.size()) {
        throw InvalidArgument("detect_minimal_spheres: curvature field does not match the state");
    }
    std::vector<MinimalSphere> out;
    const Grid& g = *state.grid;
    const RadialField s = arclength(state);
    // Signs are read from c H with a small dead band, so rounding noise on a
    // flat tail does not register as crossings.
    double scale = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) scale = std::max(scale, std::abs(state.c[i] * cf.H[i]));
    const double band = 1e-6 * scale;
    int sign = 0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double ch = state.c[i] * cf.H[i];
        const int here = ch > band ? 1 : (ch < -band ? -1 : 0);
        if (here == 0) continue;
        if (sign != 0 && here != sign) {
            std::size_t k = i - 1;
            while (k > last && (cf.H[k] < 0.0) == (cf.H[i] < 0.0)) --k;
            const double h0 = cf.H[k];
            const double h1 = cf.H[k + 1];
            const double w = h0 == h1 ? 0.5 : h0 / (h0 - h1);
            out.push_back({g[k] + w * (g[k + 1] - g[k]), s[k] + w * (s[k + 1] - s[k]),
                           state.b[k] + w * (state.b[k + 1] - state.b[k])});
        }
        sign = here;
        last = i;
    }
    return out;
}

}  // namespace bergerflow
