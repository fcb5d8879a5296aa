#include "magnus/runconfig.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "magnus/errors.hpp"

namespace magnus {

namespace {

using nlohmann::json;

const json* find(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() || it->is_null() ? nullptr : &*it;
}

double num(const json& j, const char* key, double fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return v->get<double>();
}

double required_num(const json& j, const char* key, const char* block) {
    const json* v = find(j, key);
    if (!v) throw ConfigError(std::string(block) + " block needs '" + key + "'");
    if (!v->is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return v->get<double>();
}

int integer(const json& j, const char* key, int fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(std::string("field '") + key + "' must be an integer");
    return v->get<int>();
}

std::string text(const json& j, const char* key, const std::string& fallback) {
    const json* v = find(j, key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(std::string("field '") + key + "' must be a string");
    return v->get<std::string>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* block) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(std::string("unknown field '") + it.key() + "' in " + block);
    }
}

GaussianConfig parse_gaussian(const json& g) {
    reject_unknown(g, {"tau", "epsilon", "s_p", "s_a", "s_b", "eta_a", "eta_b", "omega_bar_a", "omega_bar_b",
                       "omega_bar_p", "process"},
                   "gaussian");
    const double tau = required_num(g, "tau", "gaussian");
    const double eps = required_num(g, "epsilon", "gaussian");
    GaussianConfig c;
    const bool mismatch = find(g, "eta_a") || find(g, "eta_b");
    if (mismatch) {
        if (find(g, "s_a") || find(g, "s_b"))
            throw ConfigError("gaussian block takes either eta_a/eta_b or s_a/s_b, not both");
        c = config_from_mismatch(tau, required_num(g, "eta_a", "gaussian"), required_num(g, "eta_b", "gaussian"),
                                 eps, num(g, "s_p", 0.0));
    } else {
        c.tau = tau;
        c.epsilon = eps;
        c.s_p = required_num(g, "s_p", "gaussian");
        c.s_a = required_num(g, "s_a", "gaussian");
        c.s_b = required_num(g, "s_b", "gaussian");
    }
    c.omega_bar_a = num(g, "omega_bar_a", c.omega_bar_a);
    c.omega_bar_b = num(g, "omega_bar_b", c.omega_bar_b);
    c.omega_bar_p = num(g, "omega_bar_p", c.omega_bar_p);
    c.process = process_from_string(text(g, "process", to_string(c.process)));
    c.validate();
    return c;
}

PhysicalBlock parse_physical(const json& p) {
    reject_unknown(p, {"length_m", "tau_ps", "epsilon", "gamma", "omega_a", "omega_b", "polarization_p",
                       "polarization_a", "polarization_b", "media_file"},
                   "physical");
    PhysicalBlock b;
    b.length_m = required_num(p, "length_m", "physical");
    b.tau_ps = required_num(p, "tau_ps", "physical");
    b.epsilon = required_num(p, "epsilon", "physical");
    b.gamma = num(p, "gamma", b.gamma);
    b.omega_a = required_num(p, "omega_a", "physical");
    b.omega_b = required_num(p, "omega_b", "physical");
    b.pol_p = polarization_from_string(text(p, "polarization_p", "extraordinary"));
    b.pol_a = polarization_from_string(text(p, "polarization_a", "ordinary"));
    b.pol_b = polarization_from_string(text(p, "polarization_b", "extraordinary"));
    b.media_file = text(p, "media_file", "");
    return b;
}

std::vector<Detuning> parse_points(const json& j) {
    if (!j.is_array()) throw ConfigError("oracle.points must be an array of [d_omega_a, d_omega_b]");
    std::vector<Detuning> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ConfigError("oracle.points entries must be [d_omega_a, d_omega_b]");
        out.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return out;
}

}  // namespace

void RunConfig::validate() const {
    if (gaussian.has_value() == physical.has_value())
        throw ConfigError("exactly one of the 'gaussian' and 'physical' blocks is required");
    if (grid.points < 2) throw ConfigError("grid.points must be at least 2");
    if (!(grid.span > 0)) throw ConfigError("grid.span must be positive");
    if (!(quad.rel_tol > 0) || quad.abs_tol < 0 || quad.max_intervals < 1)
        throw ConfigError("invalid quadrature tolerances");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    if (fc.target != "modes" && fc.target != "coupling" && fc.target != "solve_eps")
        throw ConfigError("fc.target must be modes, coupling or solve_eps");
    if (fc.n < 0 || fc.modes < 0 || fc.modes > 32 || fc.points < 2) throw ConfigError("invalid fc block");
    if (oracle.which != "quadrature" && oracle.which != "propagator")
        throw ConfigError("oracle.which must be quadrature or propagator");
    if (oracle.bins < 1 || !(oracle.bin_width > 0) || oracle.max_pairs < 0 || oracle.max_pairs > 2)
        throw ConfigError("invalid oracle basis");
    for (double e : oracle.eps_list)
        if (!(e >= 0)) throw ConfigError("oracle.eps_list entries must be non-negative");
}

RunConfig parse_run_config(const std::string& json_text, const Overrides& ov) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j, {"schema", "gaussian", "physical", "grid", "quadrature", "fc", "oracle", "output"}, "config");
    if (text(j, "schema", "magnus-run/1") != "magnus-run/1") throw ConfigError("unsupported config schema");

    // Command-line overrides are folded in before hashing.
    if (ov.grid_points) j["grid"]["points"] = *ov.grid_points;
    if (ov.span) j["grid"]["span"] = *ov.span;
    if (ov.out) j["output"]["path"] = *ov.out;
    if (ov.format) j["output"]["format"] = *ov.format;

    RunConfig r;
    try {
        if (const json* g = find(j, "gaussian")) r.gaussian = parse_gaussian(*g);
        if (const json* p = find(j, "physical")) r.physical = parse_physical(*p);
        if (const json* g = find(j, "grid")) {
            reject_unknown(*g, {"points", "span"}, "grid");
            r.grid.points = integer(*g, "points", r.grid.points);
            r.grid.span = num(*g, "span", r.grid.span);
        }
        if (const json* q = find(j, "quadrature")) {
            reject_unknown(*q, {"rel_tol", "abs_tol", "max_intervals"}, "quadrature");
            r.quad.rel_tol = num(*q, "rel_tol", r.quad.rel_tol);
            r.quad.abs_tol = num(*q, "abs_tol", r.quad.abs_tol);
            r.quad.max_intervals = integer(*q, "max_intervals", r.quad.max_intervals);
        }
        if (const json* f = find(j, "fc")) {
            reject_unknown(*f, {"target", "n", "modes", "points"}, "fc");
            r.fc.target = text(*f, "target", r.fc.target);
            r.fc.n = integer(*f, "n", r.fc.n);
            r.fc.modes = integer(*f, "modes", r.fc.modes);
            r.fc.points = integer(*f, "points", r.fc.points);
        }
        if (const json* o = find(j, "oracle")) {
            reject_unknown(*o, {"which", "points", "eps_list", "bins", "bin_width", "max_pairs"}, "oracle");
            r.oracle.which = text(*o, "which", r.oracle.which);
            if (const json* pts = find(*o, "points")) r.oracle.points = parse_points(*pts);
            if (const json* e = find(*o, "eps_list")) {
                if (!e->is_array()) throw ConfigError("oracle.eps_list must be an array");
                r.oracle.eps_list.clear();
                for (const auto& v : *e) {
                    if (!v.is_number()) throw ConfigError("oracle.eps_list entries must be numbers");
                    r.oracle.eps_list.push_back(v.get<double>());
                }
            }
            r.oracle.bins = integer(*o, "bins", r.oracle.bins);
            r.oracle.bin_width = num(*o, "bin_width", r.oracle.bin_width);
            r.oracle.max_pairs = integer(*o, "max_pairs", r.oracle.max_pairs);
        }
        if (const json* o = find(j, "output")) {
            reject_unknown(*o, {"path", "format"}, "output");
            r.output_path = text(*o, "path", "");
            r.format = text(*o, "format", r.format);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (r.oracle.points.empty())
        r.oracle.points = {{0.0, 0.0}, {0.3, -0.2}, {-0.4, 0.5}, {0.6, 0.3}, {-0.2, -0.5}};
    r.validate();

    json c = j;
    c.erase("output");
    r.canonical = c.dump();
    return r;
}

RunConfig load_run_config(const std::string& path, const Overrides& ov) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), ov);
}

std::string config_hash(const RunConfig& run) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : run.canonical) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

MediaSet media_for(const PhysicalBlock& b) {
    return b.media_file.empty() ? load_default_media() : load_media(b.media_file);
}

PhysicalSetup physical_setup(const PhysicalBlock& b) {
    const MediaSet m = media_for(b);
    const PhaseMatchTriple t = triple_from_angular(b.omega_a, b.omega_b, b.pol_p, b.pol_a, b.pol_b);
    return build_setup(m, t, b.length_m, b.tau_ps, b.epsilon, b.gamma);
}

GaussianConfig resolve_gaussian(const RunConfig& run) {
    run.validate();
    if (run.gaussian) return *run.gaussian;
    return from_physical(physical_setup(*run.physical));
}

}  // namespace magnus
