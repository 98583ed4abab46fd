#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "bergerflow/config.hpp"
#include "bergerflow/curvature.hpp"
#include "bergerflow/errors.hpp"
#include "bergerflow/flow.hpp"
#include "bergerflow/initial_data.hpp"
#include "bergerflow/monitor.hpp"
#include "bergerflow/run.hpp"
#include "bergerflow/singularity.hpp"
#include "bergerflow/soliton.hpp"

namespace py = pybind11;
using namespace bergerflow;

namespace {

py::array_t<double> array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

template <typename Span>
py::array_t<double> array_of(const Span& s) {
    return py::array_t<double>(static_cast<py::ssize_t>(s.size()), s.data());
}

FamilyParams params_from(const py::kwargs& kw) {
    FamilyParams p;
    for (const auto& [key, value] : kw) {
        const std::string k = py::cast<std::string>(key);
        const double v = py::cast<double>(value);
        if (k == "B") p.B = v;
        else if (k == "a") p.a = v;
        else if (k == "ell") p.ell = v;
        else if (k == "q") p.q = v;
        else if (k == "mu0") p.mu0 = v;
        else if (k == "d") p.d = v;
        else if (k == "x0") p.x0 = v;
        else if (k == "w") p.w = v;
        else if (k == "r") p.r = v;
        else throw InvalidArgument("unknown family parameter '" + k + "'");
    }
    return p;
}

py::dict monitor_dict(const MonitorReport& r) {
    py::dict d;
    for (const auto& [k, v] : monitor_fields(r)) d[py::str(k)] = v;
    return d;
}

py::dict estimate_dict(const SingularityEstimate& e, const TypeClassification& t) {
    py::dict d;
    d["singular"] = e.singular;
    d["T_est"] = e.T_est;
    d["uncertainty"] = e.uncertainty;
    d["method"] = method_name(e.method);
    d["T_inverse_rm"] = e.T_inverse_rm;
    d["T_b2"] = e.T_b2;
    d["type"] = type_verdict_name(t.verdict);
    d["type_slope"] = t.slope;
    std::vector<double> ts, ns;
    for (const auto& [t_k, n_k] : e.N_series) {
        ts.push_back(t_k);
        ns.push_back(n_k);
    }
    d["N_t"] = array(ts);
    d["N"] = array(ns);
    return d;
}

py::dict frame_dict(const FrameRecord& f) {
    py::dict d;
    d["snapshot"] = f.snapshot;
    d["t"] = f.t;
    d["rm_max"] = f.rm_max;
    d["origin_lambda"] = f.origin_lambda;
    d["origin_dbdsigma"] = f.origin_dbdsigma;
    d["bryant_distance"] = f.bryant_distance;
    d["rotational_defect"] = f.rotational_defect;
    d["peak_x"] = f.peak_x;
    d["peak_lambda"] = f.peak_lambda;
    d["cylinder_distance"] = f.cylinder_distance;
    d["minimal_spheres"] = f.minimal_spheres;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "U(2)-invariant warped Berger Ricci flow on R^4";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ResolutionExhausted>(m, "ResolutionExhausted", PyExc_ArithmeticError);
    py::register_exception<NumericalBreakdown>(m, "NumericalBreakdown", PyExc_ArithmeticError);

    py::class_<MetricState>(m, "MetricState")
        .def_property_readonly("x", [](const MetricState& s) { return array_of(s.grid->nodes()); })
        .def_property_readonly("b", [](const MetricState& s) { return array(s.b); })
        .def_property_readonly("c", [](const MetricState& s) { return array(s.c); })
        .def_property_readonly("xi", [](const MetricState& s) { return array(s.xi); })
        .def_readonly("t", &MetricState::t)
        .def_property_readonly("inner", [](const MetricState& s) {
            return s.inner == InnerBoundary::Origin ? "origin" : "mirror";
        })
        .def("__len__", &MetricState::size);

    py::class_<CurvatureField>(m, "CurvatureField")
        .def_property_readonly("k01", [](const CurvatureField& c) { return array(c.k01); })
        .def_property_readonly("k03", [](const CurvatureField& c) { return array(c.k03); })
        .def_property_readonly("k12", [](const CurvatureField& c) { return array(c.k12); })
        .def_property_readonly("k13", [](const CurvatureField& c) { return array(c.k13); })
        .def_property_readonly("R", [](const CurvatureField& c) { return array(c.R); })
        .def_property_readonly("H", [](const CurvatureField& c) { return array(c.H); })
        .def_property_readonly("bs", [](const CurvatureField& c) { return array(c.d.bs); })
        .def_property_readonly("cs", [](const CurvatureField& c) { return array(c.d.cs); })
        .def_readonly("rm_max", &CurvatureField::rm_max)
        .def_readonly("rm_argmax", &CurvatureField::rm_argmax);

    m.def(
        "initial_state",
        [](const std::string& family, std::size_t n_nodes, double x_max, double cluster_factor, const py::kwargs& kw) {
            auto grid = std::make_shared<const Grid>(build_grid(n_nodes, x_max, cluster_factor));
            return construct_initial(parse_family(family), params_from(kw), grid);
        },
        py::arg("family"), py::arg("n_nodes") = 2048, py::arg("x_max") = 20.0, py::arg("cluster_factor") = 1.0,
        "Samples a closed-form family on a fresh grid; family parameters are keyword arguments.");

    m.def("curvature_field", py::overload_cast<const MetricState&>(&curvature_field), py::arg("state"));

    m.def("validate_class", [](const MetricState& s) {
        const ClassValidation v = validate_class(s);
        py::dict d;
        d["verdict"] = std::string(class_name(v.verdict));
        d["smooth_at_origin"] = v.smooth_at_origin;
        d["min_bs"] = v.min_bs;
        d["min_H"] = v.min_H;
        d["sup_b"] = v.sup_b;
        d["sup_b_finite"] = v.sup_b_finite;
        d["ratio_floor"] = v.ratio_floor;
        d["curvature_decay_ok"] = v.curvature_decay_ok;
        d["fiber_floor"] = v.fiber_floor;
        return d;
    });

    m.def("monitor_report", [](const MetricState& s) { return monitor_dict(monitor_report(s, curvature_field(s))); });

    py::class_<FlowState>(m, "Flow")
        .def(py::init([](const MetricState& s) {
                 FlowState f;
                 f.state = s;
                 return f;
             }),
             py::arg("state"))
        .def(
            "step",
            [](FlowState& f, std::size_t count) {
                for (std::size_t k = 0; k < count; ++k) f = step(std::move(f), StepControl{});
            },
            py::arg("count") = 1)
        .def(
            "rescale",
            [](FlowState& f, double zoom) { f = rescale_continue(f, zoom); }, py::arg("zoom"))
        .def_property_readonly("state", [](const FlowState& f) { return f.state; })
        .def_property_readonly("time", &FlowState::physical_time)
        .def_readonly("steps", &FlowState::step_count)
        .def_readonly("lambda_total", &FlowState::lambda_total);

    m.def(
        "estimate_T",
        [](const std::vector<double>& t, const std::vector<double>& rm, const std::vector<double>& b2) {
            if (t.size() != rm.size() || t.size() != b2.size()) {
                throw InvalidArgument("estimate_T: t, rm_max and b2 must have equal lengths");
            }
            std::vector<SeriesSample> s;
            for (std::size_t i = 0; i < t.size(); ++i) s.push_back({t[i], rm[i], b2[i]});
            const SingularityEstimate e = estimate_T(s);
            return estimate_dict(e, classify_type(e));
        },
        py::arg("t"), py::arg("rm_max"), py::arg("b2_peak"));

    py::class_<Profile>(m, "Profile")
        .def_property_readonly("sigma", [](const Profile& p) { return array(p.sigma); })
        .def_property_readonly("phi", [](const Profile& p) { return array(p.phi); })
        .def_property_readonly("dphi", [](const Profile& p) { return array(p.dphi); })
        .def_readonly("residual", &Profile::residual)
        .def("phi_at", &Profile::phi_at, py::arg("sigma"));

    m.def("bryant_profile", &bryant_profile, py::arg("sigma_max") = 20.0, py::arg("tol") = 1e-10,
          py::arg("spacing") = 0.01);
    m.def("cylinder_profile", &cylinder_profile, py::arg("radius") = 2.449489742783178, py::arg("sigma_max") = 20.0,
          py::arg("spacing") = 0.01);

    m.def("validate_config", [](const std::string& text) { validate_config(parse_config(text)); },
          py::arg("text"), "Parses and validates configuration text; raises ConfigError.");

    m.def(
        "run",
        [](const std::string& text, const std::string& output_dir) {
            RunConfig c = parse_config(text);
            if (!output_dir.empty()) c.output.dir = output_dir;
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run(c);
            }
            py::dict d;
            d["termination"] = termination_name(r.termination);
            d["exit_code"] = r.exit_code;
            d["class"] = std::string(class_name(r.validation.verdict));
            d["steps"] = r.steps;
            d["rescales"] = r.rescales;
            d["t_final"] = r.t_final;
            d["trusted"] = r.trusted;
            d["estimate"] = estimate_dict(r.estimate, r.type);
            py::list frames;
            for (const auto& f : r.frames) frames.append(frame_dict(f));
            d["frames"] = frames;
            py::dict verdicts;
            for (const auto& v : r.verdicts) verdicts[py::str(v.name)] = v.pass;
            d["monitor"] = verdicts;
            d["timeseries"] = r.timeseries_path;
            return d;
        },
        py::arg("config_text"), py::arg("output_dir") = "");

    m.def(
        "analyze",
        [](const std::string& dir) {
            const AnalysisResult a = analyze(dir);
            py::dict d;
            d["estimate"] = estimate_dict(a.estimate, a.type);
            py::list frames;
            for (const auto& f : a.frames) frames.append(frame_dict(f));
            d["frames"] = frames;
            return d;
        },
        py::arg("run_dir"));
}
