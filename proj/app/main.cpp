#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bergerflow/config.hpp"
#include "bergerflow/errors.hpp"
#include "bergerflow/initial_data.hpp"
#include "bergerflow/io.hpp"
#include "bergerflow/run.hpp"
#include "bergerflow/soliton.hpp"

using namespace bergerflow;

namespace {

constexpr int kExitConfig = 4;

void print_validation(const ClassValidation& v) {
    std::printf("class               %s\n", std::string(class_name(v.verdict)).c_str());
    std::printf("smooth_at_origin    %s (b_s residual %.3e, c_s residual %.3e)\n",
                v.smooth_at_origin ? "yes" : "no", v.bs_origin_residual, v.cs_origin_residual);
    std::printf("min_bs              %.6g\n", v.min_bs);
    std::printf("min_H               %.6g at x = %.6g\n", v.min_H, v.min_H_x);
    std::printf("sup_b               %.6g%s\n", v.sup_b, v.sup_b_finite ? "" : " (unbounded)");
    std::printf("ratio c/b           [%.6g, %.6g]\n", v.ratio_floor, v.ratio_ceiling);
    std::printf("curvature decay     %s\n", v.curvature_decay_ok ? "yes" : "no");
    std::printf("fiber floor         %.6g\n", v.fiber_floor);
}

void print_estimate(const SingularityEstimate& e, const TypeClassification& tc) {
    if (!e.singular) {
        std::printf("singular            no\n");
        return;
    }
    std::printf("singular            yes\n");
    std::printf("T_est               %.10g +- %.3g (%s)\n", e.T_est, e.uncertainty, method_name(e.method).c_str());
    std::printf("type                %s (slope %.4g over %.2f decades)\n", type_verdict_name(tc.verdict).c_str(),
                tc.slope, tc.decades_used);
}

int cmd_run(const std::string& path, const std::string& out_dir) {
    RunConfig cfg = load_config(path);
    if (!out_dir.empty()) cfg.output.dir = out_dir;
    const RunResult r = run(cfg);
    std::printf("termination         %s (%s)\n", termination_name(r.termination).c_str(), r.message.c_str());
    std::printf("class               %s\n", std::string(class_name(r.validation.verdict)).c_str());
    std::printf("steps               %zu (rescales %zu, regrids %zu)\n", r.steps, r.rescales, r.regrids);
    std::printf("t_final             %.10g\n", r.t_final);
    if (!r.series.empty()) std::printf("rm_max              %.6g\n", r.series.back().report.rm_max);
    std::printf("trusted             %s\n",
                r.trusted ? "whole run" : ("until t = " + std::to_string(r.trusted_until)).c_str());
    for (const auto& v : r.verdicts) {
        std::printf("monitor %-12s %s%s\n", v.name.c_str(), v.pass ? "PASS" : "FAIL",
                    v.pass ? "" : (" at t = " + std::to_string(v.t_fail) + ": " + v.detail).c_str());
    }
    print_estimate(r.estimate, r.type);
    std::printf("output              %s\n", r.run_dir.c_str());
    return r.exit_code;
}

int cmd_analyze(const std::string& dir) {
    const AnalysisResult a = analyze(dir);
    print_estimate(a.estimate, a.type);
    for (const auto& f : a.frames) {
        std::printf("frame %4zu t=%.10g rm=%.4g bryant=%.4g defect=%.4g cylinder=%.4g minimal=%zu\n", f.snapshot,
                    f.t, f.rm_max, f.bryant_distance, f.rotational_defect, f.cylinder_distance, f.minimal_spheres);
    }
    std::printf("output              %s\n", a.path.c_str());
    return 0;
}

int cmd_validate(const std::string& path) {
    const RunConfig cfg = load_config(path);
    auto grid = std::make_shared<const Grid>(
        build_grid(cfg.grid.n_nodes, cfg.grid.x_max, cfg.grid.cluster_factor));
    MetricState state;
    try {
        state = construct_initial(cfg.family, cfg.params, grid);
    } catch (const InvalidArgument& e) {
        throw ConfigError("family", 0, e.what());
    }
    std::printf("family              %s\n", std::string(family_name(cfg.family)).c_str());
    print_validation(validate_class(state));
    return 0;
}

int cmd_oracle(const std::string& kind, double sigma_max, double radius, std::string out) {
    Profile p;
    if (kind == "bryant") {
        p = bryant_profile(sigma_max);
    } else {
        p = cylinder_profile(radius, sigma_max);
    }
    if (out.empty()) out = kind + "_profile.tsv";
    write_profile(p, out);
    std::printf("%s profile (%s), sigma in [0, %g], residual %.3e -> %s\n", kind.c_str(), p.normalization.c_str(),
                p.sigma_max(), p.residual, out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Warped Berger Ricci flow simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    auto* run_cmd = app.add_subcommand("run", "Evolve a configuration and write a run directory");
    run_cmd->add_option("config", config_path, "Configuration file")->required();
    run_cmd->add_option("-o,--output", out_dir, "Override the output directory");

    std::string run_dir;
    auto* analyze_cmd = app.add_subcommand("analyze", "Recompute estimates and frames from a run directory");
    analyze_cmd->add_option("run-dir", run_dir, "Run directory")->required();

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Report the class of the initial data");
    validate_cmd->add_option("config", validate_path, "Configuration file")->required();

    std::string kind;
    double sigma_max = 20.0;
    double radius = std::sqrt(6.0);
    std::string oracle_out;
    auto* oracle_cmd = app.add_subcommand("oracle", "Write a reference soliton profile");
    oracle_cmd->add_option("kind", kind, "bryant or cylinder")->required()->check(CLI::IsMember({"bryant", "cylinder"}));
    oracle_cmd->add_option("--sigma-max", sigma_max, "Largest sigma")->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--radius", radius, "Cylinder radius")->check(CLI::PositiveNumber);
    oracle_cmd->add_option("-o,--output", oracle_out, "Output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd) return cmd_run(config_path, out_dir);
        if (*analyze_cmd) return cmd_analyze(run_dir);
        if (*validate_cmd) return cmd_validate(validate_path);
        return cmd_oracle(kind, sigma_max, radius, oracle_out);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalBreakdown& e) {
        std::cerr << "numerical breakdown: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
