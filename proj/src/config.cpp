#include "bergerflow/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "bergerflow/errors.hpp"

namespace bergerflow {

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view v, const std::string& key, std::size_t line) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError(key, line, "expected a finite number, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t parse_unsigned(std::string_view v, const std::string& key, std::size_t line) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(key, line, "expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view, std::size_t)> set;
};

template <class Access>
Field real_field(std::string section, std::string key, Access access) {
    auto k = key;
    return {std::move(section), std::move(key),
            [access](RunConfig c) { return format_double(access(c)); },
            [access, k](RunConfig& c, std::string_view v, std::size_t line) {
                access(c) = parse_double(v, k, line);
            }};
}

template <class T, class Access>
Field count_field(std::string section, std::string key, Access access) {
    auto k = key;
    return {std::move(section), std::move(key),
            [access](RunConfig c) { return std::to_string(access(c)); },
            [access, k](RunConfig& c, std::string_view v, std::size_t line) {
                const std::uint64_t u = parse_unsigned(v, k, line);
                if (u > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
                    throw ConfigError(k, line, "value out of range");
                }
                access(c) = static_cast<T>(u);
            }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        f.push_back({"initial", "family", [](const RunConfig& c) { return std::string(family_name(c.family)); },
                     [](RunConfig& c, std::string_view v, std::size_t line) {
                         try {
                             c.family = parse_family(v);
                         } catch (const InvalidArgument& e) {
                             throw ConfigError("family", line, e.what());
                         }
                     }});
        f.push_back(real_field("initial", "B", [](RunConfig& c) -> double& { return c.params.B; }));
        f.push_back(real_field("initial", "a", [](RunConfig& c) -> double& { return c.params.a; }));
        f.push_back(real_field("initial", "ell", [](RunConfig& c) -> double& { return c.params.ell; }));
        f.push_back(real_field("initial", "q", [](RunConfig& c) -> double& { return c.params.q; }));
        f.push_back(real_field("initial", "mu0", [](RunConfig& c) -> double& { return c.params.mu0; }));
        f.push_back(real_field("initial", "d", [](RunConfig& c) -> double& { return c.params.d; }));
        f.push_back(real_field("initial", "x0", [](RunConfig& c) -> double& { return c.params.x0; }));
        f.push_back(real_field("initial", "w", [](RunConfig& c) -> double& { return c.params.w; }));
        f.push_back(real_field("initial", "r", [](RunConfig& c) -> double& { return c.params.r; }));

        f.push_back(count_field<std::size_t>("grid", "n_nodes", [](RunConfig& c) -> std::size_t& { return c.grid.n_nodes; }));
        f.push_back(real_field("grid", "x_max", [](RunConfig& c) -> double& { return c.grid.x_max; }));
        f.push_back(real_field("grid", "cluster_factor", [](RunConfig& c) -> double& { return c.grid.cluster_factor; }));

        f.push_back(real_field("step", "cfl_factor", [](RunConfig& c) -> double& { return c.step.cfl_factor; }));
        f.push_back(real_field("step", "curvature_factor", [](RunConfig& c) -> double& { return c.step.curvature_factor; }));
        f.push_back(real_field("step", "dt_min", [](RunConfig& c) -> double& { return c.step.dt_min; }));
        f.push_back(real_field("step", "dt_max", [](RunConfig& c) -> double& { return c.step.dt_max; }));
        f.push_back(count_field<int>("step", "max_retries", [](RunConfig& c) -> int& { return c.step.max_retries; }));

        f.push_back(real_field("run", "t_max", [](RunConfig& c) -> double& { return c.run.t_max; }));
        f.push_back(real_field("run", "stop_rm_growth", [](RunConfig& c) -> double& { return c.run.stop_rm_growth; }));
        f.push_back(count_field<std::size_t>("run", "max_rescales", [](RunConfig& c) -> std::size_t& { return c.run.max_rescales; }));
        f.push_back(real_field("run", "rescale_trigger", [](RunConfig& c) -> double& { return c.run.rescale_trigger; }));
        f.push_back(real_field("run", "nodes_per_unit", [](RunConfig& c) -> double& { return c.run.nodes_per_unit; }));
        f.push_back(real_field("run", "cells_per_radius", [](RunConfig& c) -> double& { return c.run.cells_per_radius; }));
        f.push_back(count_field<std::size_t>("run", "max_steps", [](RunConfig& c) -> std::size_t& { return c.run.max_steps; }));

        f.push_back(real_field("snapshots", "decade_step", [](RunConfig& c) -> double& { return c.snapshots.decade_step; }));
        f.push_back(real_field("snapshots", "every_dt", [](RunConfig& c) -> double& { return c.snapshots.every_dt; }));

        f.push_back(real_field("monitor", "sign", [](RunConfig& c) -> double& { return c.monitor.sign; }));
        f.push_back(real_field("monitor", "ratio_upper", [](RunConfig& c) -> double& { return c.monitor.ratio_upper; }));
        f.push_back(real_field("monitor", "ratio_lower", [](RunConfig& c) -> double& { return c.monitor.ratio_lower; }));
        f.push_back(real_field("monitor", "sup_b", [](RunConfig& c) -> double& { return c.monitor.sup_b; }));
        f.push_back(real_field("monitor", "phi4_rate", [](RunConfig& c) -> double& { return c.monitor.phi4_rate; }));

        f.push_back({"output", "dir", [](const RunConfig& c) { return c.output.dir; },
                     [](RunConfig& c, std::string_view v, std::size_t line) {
                         if (v.empty()) throw ConfigError("dir", line, "output directory must not be empty");
                         c.output.dir = std::string(v);
                     }});
        f.push_back(count_field<std::size_t>("output", "series_stride", [](RunConfig& c) -> std::size_t& { return c.output.series_stride; }));

        f.push_back(real_field("analysis", "sigma_max", [](RunConfig& c) -> double& { return c.analysis.sigma_max; }));
        f.push_back(real_field("analysis", "sigma_cmp", [](RunConfig& c) -> double& { return c.analysis.sigma_cmp; }));
        f.push_back(real_field("analysis", "type_one", [](RunConfig& c) -> double& { return c.analysis.type.type_one; }));
        f.push_back(real_field("analysis", "type_two", [](RunConfig& c) -> double& { return c.analysis.type.type_two; }));
        f.push_back(real_field("analysis", "decades", [](RunConfig& c) -> double& { return c.analysis.type.decades; }));
        f.push_back(count_field<std::uint64_t>("analysis", "seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; }));
        return f;
    }();
    return table;
}

void check(bool ok, const std::string& key, const std::string& what, std::size_t line = 0) {
    if (!ok) throw ConfigError(key, line, what);
}

void validate_with_lines(const RunConfig& c, const std::function<std::size_t(const std::string&)>& line_of) {
    auto require = [&](bool ok, const std::string& key, const std::string& what) { check(ok, key, what, line_of(key)); };
    require(c.grid.n_nodes >= 16, "n_nodes", "must be at least 16");
    require(c.grid.x_max > 0.0, "x_max", "must be positive");
    require(c.grid.cluster_factor >= 1.0, "cluster_factor", "must be >= 1");
    require(c.step.cfl_factor > 0.0, "cfl_factor", "must be positive");
    require(c.step.curvature_factor > 0.0, "curvature_factor", "must be positive");
    require(c.step.dt_min > 0.0, "dt_min", "must be positive");
    require(c.step.dt_max > c.step.dt_min, "dt_max", "must exceed dt_min");
    require(c.run.t_max > 0.0, "t_max", "must be positive");
    require(c.run.stop_rm_growth == 0.0 || c.run.stop_rm_growth > 1.0, "stop_rm_growth", "must be 0 or > 1");
    require(c.run.rescale_trigger > 1.0, "rescale_trigger", "must exceed 1");
    require(c.run.nodes_per_unit > 0.0, "nodes_per_unit", "must be positive");
    require(c.run.cells_per_radius > 0.0, "cells_per_radius", "must be positive");
    require(c.snapshots.decade_step > 0.0, "decade_step", "must be positive");
    require(c.snapshots.every_dt >= 0.0, "every_dt", "must be >= 0");
    for (const char* k : {"sign", "ratio_upper", "ratio_lower", "sup_b", "phi4_rate"}) {
        const double v = k == std::string("sign")          ? c.monitor.sign
                         : k == std::string("ratio_upper") ? c.monitor.ratio_upper
                         : k == std::string("ratio_lower") ? c.monitor.ratio_lower
                         : k == std::string("sup_b")       ? c.monitor.sup_b
                                                           : c.monitor.phi4_rate;
        require(v >= 0.0, k, "must be >= 0");
    }
    require(c.output.series_stride >= 1, "series_stride", "must be >= 1");
    require(c.analysis.sigma_max > 0.0, "sigma_max", "must be positive");
    require(c.analysis.sigma_cmp > 0.0 && c.analysis.sigma_cmp <= c.analysis.sigma_max, "sigma_cmp",
            "must lie in (0, sigma_max]");
    require(c.analysis.type.type_one >= 0.0, "type_one", "must be >= 0");
    require(c.analysis.type.type_two < -c.analysis.type.type_one, "type_two", "must be below -type_one");
    require(c.analysis.type.decades >= 1.0, "decades", "must be >= 1");
    try {
        check_family_params(c.family, c.params);
    } catch (const InvalidArgument& e) {
        throw ConfigError("family", line_of("family"), e.what());
    }
}

}  // namespace

void validate_config(const RunConfig& config) {
    validate_with_lines(config, [](const std::string&) { return std::size_t{0}; });
}

RunConfig parse_config(std::string_view text) {
    static const std::set<std::string> sections{"initial", "grid", "step", "run",
                                                "snapshots", "monitor", "output", "analysis"};
    RunConfig cfg;
    std::map<std::string, std::size_t> seen;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("", line_no, "malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!sections.count(section)) throw ConfigError(section, line_no, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("", line_no, "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("", line_no, "missing key");
        const Field* field = nullptr;
        for (const auto& f : fields()) {
            if (f.key == key) field = &f;
        }
        if (!field) throw ConfigError(key, line_no, "unknown key");
        if (!section.empty() && field->section != section) {
            throw ConfigError(key, line_no, "key belongs to section [" + field->section + "]");
        }
        if (seen.count(key)) throw ConfigError(key, line_no, "duplicate key");
        seen[key] = line_no;
        field->set(cfg, value, line_no);
    }
    validate_with_lines(cfg, [&](const std::string& k) {
        auto it = seen.find(k);
        return it == seen.end() ? std::size_t{0} : it->second;
    });
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", 0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream os;
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            if (!section.empty()) os << '\n';
            section = f.section;
            os << '[' << section << "]\n";
        }
        os << f.key << " = " << f.get(config) << '\n';
    }
    return os.str();
}

}  // namespace bergerflow
