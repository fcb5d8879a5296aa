#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>
#include <numbers>
#include <typeinfo>

#include "magnus/errors.hpp"
#include "magnus/fconv.hpp"
#include "magnus/metrics.hpp"
#include "magnus/oracle.hpp"

namespace magnus::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Values the bundled PPLN data are expected to reproduce.
struct Reference {
    double n_p = 2.15541, n_a = 2.21112, n_b = 2.10269;
    double ng_p = 2.20054, ng_a = 2.26276, ng_b = 2.17833;
    double poling_um = 58.25;
};

ordered_json header(const std::string& command, const RunConfig& run) {
    ordered_json h;
    h["tool"] = kToolVersion;
    h["command"] = command;
    h["config_hash"] = config_hash(run);
    return h;
}

ordered_json derived_json(const DerivedParams& p) {
    ordered_json d;
    d["tau"] = p.tau;
    d["eta_a"] = p.eta_a;
    d["eta_b"] = p.eta_b;
    d["eta_ab"] = p.eta_ab;
    d["mu2"] = p.mu2;
    d["mu_a2"] = p.mua2;
    d["mu_b2"] = p.mub2;
    d["R2"] = p.R2;
    d["M4"] = p.M4;
    d["N4"] = p.calN4;
    return d;
}

ordered_json config_json(const GaussianConfig& c) {
    ordered_json g;
    g["tau"] = c.tau;
    g["epsilon"] = c.epsilon;
    g["s_p"] = c.s_p;
    g["s_a"] = c.s_a;
    g["s_b"] = c.s_b;
    g["omega_bar_a"] = c.omega_bar_a;
    g["omega_bar_b"] = c.omega_bar_b;
    g["omega_bar_p"] = c.omega_bar_p;
    g["process"] = to_string(c.process);
    return g;
}

// null for non-finite values.
ordered_json number_or_null(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string sidecar_path(const RunConfig& run) { return run.output_path + ".json"; }

std::vector<double> jsa_axis(const DerivedParams& p, const RunConfig& run) {
    const double half = default_half_width(p, run.grid.span);
    return linspace(-half, half, run.grid.points);
}

void require_finite(const Eigen::MatrixXd& m, const char* what) {
    if (!m.allFinite()) throw OverflowError(std::string(what) + " grid contains non-finite values");
}

std::string error_type(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const DegenerateModel*>(&e)) return "DegenerateModel";
    if (dynamic_cast<const OverflowError*>(&e)) return "OverflowError";
    if (dynamic_cast<const QuadratureFailure*>(&e)) return "QuadratureFailure";
    if (dynamic_cast<const GridTooNarrow*>(&e)) return "GridTooNarrow";
    if (dynamic_cast<const OutOfRange*>(&e)) return "OutOfRange";
    if (dynamic_cast<const NotConverged*>(&e)) return "NotConverged";
    if (dynamic_cast<const BasisMismatch*>(&e)) return "BasisMismatch";
    if (dynamic_cast<const IoError*>(&e)) return "IoError";
    return "Error";
}

ordered_json failure_json(const std::exception& e) {
    ordered_json f;
    f["type"] = error_type(e);
    f["message"] = e.what();
    if (auto q = dynamic_cast<const QuadratureFailure*>(&e)) f["axis"] = q->axis();
    if (auto n = dynamic_cast<const NotConverged*>(&e)) f["ratio"] = number_or_null(n->ratio());
    if (auto o = dynamic_cast<const OutOfRange*>(&e)) f["value"] = o->value();
    return f;
}

}  // namespace

std::string fmt(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

CommandResult cmd_jsa(const RunConfig& run) {
    const GaussianConfig c = resolve_gaussian(run);
    const DerivedParams p = derive_params(c);
    const auto axis = jsa_axis(p, run);
    // Normalised grids do not depend on eps, so the terms are evaluated at eps = 1.
    JsaTerms t = jsa_terms_grid(p, 1.0, c.tau, axis, axis, run.quad);
    t.j1 /= c.tau;
    t.j3 /= c.tau;
    t.k3 /= c.tau;
    require_finite(t.j1, "j1");
    require_finite(t.j3, "j3");
    require_finite(t.k3, "k3");

    CommandResult res;
    std::string body;
    if (run.format == "csv") {
        body = "# magnus jsa config_hash=" + config_hash(run) + "\n";
        body += "d_omega_a,d_omega_b,j1_norm,j3_norm,k3_norm\n";
        for (std::size_t i = 0; i < axis.size(); ++i)
            for (std::size_t j = 0; j < axis.size(); ++j) {
                body += fmt(axis[i]) + ',' + fmt(axis[j]) + ',' + fmt(t.j1(i, j)) + ',' + fmt(t.j3(i, j)) + ',' +
                        fmt(t.k3(i, j)) + '\n';
            }
    } else {
        ordered_json j = header("jsa", run);
        j["grid"] = axis;
        auto rows = [&](const Eigen::MatrixXd& m) {
            std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                for (Eigen::Index k = 0; k < m.cols(); ++k) out[i][k] = m(i, k);
            return out;
        };
        j["j1_norm"] = rows(t.j1);
        j["j3_norm"] = rows(t.j3);
        j["k3_norm"] = rows(t.k3);
        body = j.dump() + "\n";
    }
    res.artifacts.push_back({run.output_path, body});

    if (!run.output_path.empty()) {
        ordered_json s = header("jsa", run);
        s["config"] = json::parse(run.canonical);
        s["resolved"] = config_json(c);
        s["derived"] = derived_json(p);
        s["grid"] = {{"points", run.grid.points}, {"span", run.grid.span}, {"half_width", axis.back()}};
        s["normalization"] = {{"j1_norm", "J1/(eps tau)"}, {"j3_norm", "J3/(eps^3 tau)"}, {"k3_norm", "K3/(eps^3 tau)"}};
        s["peaks"] = {{"j1_norm", t.j1.cwiseAbs().maxCoeff()},
                      {"j3_norm", t.j3.cwiseAbs().maxCoeff()},
                      {"k3_norm", t.k3.cwiseAbs().maxCoeff()}};
        s["j3_norm_bound"] = j3_bound(p, 1.0, c.tau) / c.tau;
        res.artifacts.push_back({sidecar_path(run), dump(s)});
    }
    return res;
}

CommandResult cmd_metrics(const RunConfig& run) {
    const GaussianConfig c = resolve_gaussian(run);
    const DerivedParams p = derive_params(c);
    ordered_json r = header("metrics", run);
    r["resolved"] = config_json(c);
    r["derived"] = derived_json(p);

    const SchmidtValue sa = schmidt_analytic(p);
    r["schmidt_analytic"] = number_or_null(sa.value);
    r["schmidt_divergent"] = sa.divergent;

    const auto axis = jsa_axis(p, run);
    const double eps = c.epsilon;
    const JsaTerms t = jsa_terms_grid(p, eps > 0 ? eps : 1.0, c.tau, axis, axis, run.quad);
    // The Schmidt decomposition needs the kernel to have decayed below 1e-8 at the edges.
    ComplexKernel k;
    const double shalf = default_half_width(p, std::max(run.grid.span, 5.0));
    k.grid_a = k.grid_b = linspace(-shalf, shalf, run.grid.points);
    k.values.resize(run.grid.points, run.grid.points);
    for (int i = 0; i < run.grid.points; ++i)
        for (int j = 0; j < run.grid.points; ++j) k.values(i, j) = j1(p, 1.0, c.tau, {k.grid_a[i], k.grid_b[j]});
    r["schmidt_half_width"] = shalf;
    try {
        r["schmidt_numeric"] = schmidt_numeric(k).schmidt_number;
    } catch (const GridTooNarrow& e) {
        r["schmidt_numeric"] = nullptr;
        r["schmidt_numeric_error"] = failure_json(e);
    }
    r["tau2_over_r2"] = tau2_over_r2(p, c.tau);
    r["fom_r_bound"] = fom_r_bound(p, eps, c.tau);
    r["fom_r_measured"] = eps > 0 ? ordered_json(fom_r_measured(t.j1, t.j3)) : ordered_json(nullptr);
    r["rho"] = rho(p, eps, c.tau);
    if (run.physical) {
        const CopropagationTimes ct = copropagation_times(physical_setup(*run.physical));
        r["copropagation"] = {{"walkoff_a", number_or_null(ct.walkoff_a)},
                              {"walkoff_b", number_or_null(ct.walkoff_b)},
                              {"transit_a", ct.transit_a},
                              {"transit_b", ct.transit_b},
                              {"infinite_walkoff_a", ct.infinite_walkoff_a},
                              {"infinite_walkoff_b", ct.infinite_walkoff_b}};
    } else {
        r["copropagation"] = nullptr;
    }
    r["grid"] = {{"points", run.grid.points}, {"span", run.grid.span}, {"half_width", axis.back()}};
    return {{{run.output_path, dump(r)}}, 0};
}

CommandResult cmd_fc(const RunConfig& run) {
    const GaussianConfig c = resolve_gaussian(run);
    if (c.process != Process::FC) throw ConfigError("fc needs a configuration with process FC");
    const DerivedParams p = derive_params(c);
    const FcModeSpec m = fc_mode_spec(p, c.epsilon, c.tau);
    ordered_json head = header("fc", run);
    head["target"] = run.fc.target;
    head["schmidt_number"] = m.S;
    head["s"] = m.s;
    head["theta0"] = m.theta0;

    CommandResult res;
    if (run.fc.target == "coupling") {
        std::vector<double> g;
        for (int j = 0; j <= run.fc.modes; ++j) g.push_back(fc_coupling(p, c.epsilon, c.tau, j));
        head["g"] = g;
        head["efficiency"] = [&] {
            std::vector<double> e;
            for (double x : g) e.push_back(std::pow(std::sin(x), 2));
            return e;
        }();
        res.artifacts.push_back({run.output_path, dump(head)});
    } else if (run.fc.target == "solve_eps") {
        const double e = solve_epsilon_for_full_conversion(p, c.tau, run.fc.n);
        const double gn = fc_coupling(p, e, c.tau, run.fc.n);
        head["n"] = run.fc.n;
        head["epsilon"] = e;
        head["g_n"] = gn;
        head["efficiency"] = std::pow(std::sin(gn), 2);
        res.artifacts.push_back({run.output_path, dump(head)});
    } else {
        const int nm = run.fc.modes;
        auto axis_for = [&](Side side) {
            const double mu = side == Side::A ? p.mua() : p.mub();
            const double half = 6.0 * std::sqrt(m.S) / mu;
            return linspace(-half, half, run.fc.points);
        };
        const auto ga = axis_for(Side::A), gb = axis_for(Side::B);
        std::vector<std::vector<double>> A, B;
        for (int j = 0; j <= nm; ++j) {
            A.push_back(fc_mode(p, j, Side::A, ga));
            B.push_back(fc_mode(p, j, Side::B, gb));
        }
        // Post-check: rectangle-rule Gram matrices.
        double defect = 0.0;
        for (const auto* set : {&A, &B}) {
            const double h = set == &A ? ga[1] - ga[0] : gb[1] - gb[0];
            for (int j = 0; j <= nm; ++j)
                for (int k = 0; k <= j; ++k) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < ga.size(); ++i) s += (*set)[j][i] * (*set)[k][i];
                    defect = std::max(defect, std::abs(s * h - (j == k ? 1.0 : 0.0)));
                }
        }
        std::string body = "# magnus fc config_hash=" + config_hash(run) + "\n";
        body += "index,d_omega_a,d_omega_b";
        for (int j = 0; j <= nm; ++j) body += ",A_" + std::to_string(j);
        for (int j = 0; j <= nm; ++j) body += ",B_" + std::to_string(j);
        body += '\n';
        for (std::size_t i = 0; i < ga.size(); ++i) {
            body += std::to_string(i) + ',' + fmt(ga[i]) + ',' + fmt(gb[i]);
            for (int j = 0; j <= nm; ++j) body += ',' + fmt(A[j][i]);
            for (int j = 0; j <= nm; ++j) body += ',' + fmt(B[j][i]);
            body += '\n';
        }
        res.artifacts.push_back({run.output_path, body});
        head["modes"] = nm;
        head["points"] = run.fc.points;
        head["orthonormality_defect"] = defect;
        head["g"] = [&] {
            std::vector<double> g;
            for (int j = 0; j <= nm; ++j) g.push_back(fc_coupling(p, c.epsilon, c.tau, j));
            return g;
        }();
        if (!run.output_path.empty()) res.artifacts.push_back({sidecar_path(run), dump(head)});
        if (defect > 1e-6) res.exit_code = 3;
    }
    return res;
}

CommandResult cmd_oracle(const RunConfig& run) {
    const GaussianConfig c = resolve_gaussian(run);
    const DerivedParams p = derive_params(c);
    ordered_json r = header("oracle", run);
    r["which"] = run.oracle.which;
    r["derived"] = derived_json(p);
    bool failed = false;

    if (run.oracle.which == "quadrature") {
        ordered_json rows = ordered_json::array();
        for (const Detuning& u : run.oracle.points) {
            ordered_json row;
            row["d_omega_a"] = u.d_omega_a;
            row["d_omega_b"] = u.d_omega_b;
            try {
                const double a = j3(p, c.epsilon, c.tau, u, run.quad);
                const OracleResult o = oracle_j3_detail(c, u);
                row["j3"] = a;
                row["oracle"] = o.value;
                row["abs_deviation"] = std::abs(o.value - a);
                row["rel_deviation"] = a != 0.0 ? ordered_json(std::abs(o.value - a) / std::abs(a)) : ordered_json(nullptr);
                row["panels"] = o.panels;
                row["panel_change"] = o.change;
            } catch (const Error& e) {
                row["failure"] = failure_json(e);
                failed = true;
            }
            rows.push_back(row);
        }
        r["points"] = rows;
    } else {
        const FockBasis basis = FockBasis::centered(run.oracle.bins, run.oracle.bins, run.oracle.bin_width,
                                                    run.oracle.max_pairs);
        r["basis"] = {{"bins", run.oracle.bins},
                      {"bin_width", run.oracle.bin_width},
                      {"max_pairs", run.oracle.max_pairs},
                      {"dimension", basis.dim()}};
        ordered_json rows = ordered_json::array();
        double prev_full = 0.0, prev_j1 = 0.0;
        for (double e : run.oracle.eps_list) {
            ordered_json row;
            row["epsilon"] = e;
            GaussianConfig ce = c;
            ce.epsilon = e;
            try {
                const PropagationResult pr = propagate_time_ordered(ce, basis, {});
                const FockState init = make_state(basis, basis.initial_state());
                const FockState full = apply_analytic_factorization(p, e, c.tau, basis, init);
                const FockState first = apply_analytic_factorization(p, e, c.tau, basis, init, {false, false, false});
                const double df = compare_states_aligned(pr.state, full);
                const double d1 = compare_states_aligned(pr.state, first);
                row["steps"] = pr.n_steps;
                row["norm"] = pr.state.norm();
                row["distance_full"] = df;
                row["distance_j1"] = d1;
                row["ratio_full"] = prev_full > 0 && df > 0 ? ordered_json(prev_full / df) : ordered_json(nullptr);
                row["ratio_j1"] = prev_j1 > 0 && d1 > 0 ? ordered_json(prev_j1 / d1) : ordered_json(nullptr);
                prev_full = df;
                prev_j1 = d1;
            } catch (const Error& ex) {
                row["failure"] = failure_json(ex);
                failed = true;
                prev_full = prev_j1 = 0.0;
            }
            rows.push_back(row);
        }
        r["eps_list"] = rows;
    }
    return {{{run.output_path, dump(r)}}, failed ? 3 : 0};
}

CommandResult cmd_dispersion(const RunConfig& run) {
    if (!run.physical) throw ConfigError("dispersion needs a 'physical' block");
    const PhysicalBlock& b = *run.physical;
    const MediaSet media = media_for(b);
    const PhaseMatchTriple t = triple_from_angular(b.omega_a, b.omega_b, b.pol_p, b.pol_a, b.pol_b);
    const auto& mp = media.get(t.pol_p);
    const auto& ma = media.get(t.pol_a);
    const auto& mb = media.get(t.pol_b);
    const Reference ref;

    ordered_json r = header("dispersion", run);
    const double defect = std::abs(1.0 / t.lambda_p - 1.0 / t.lambda_a - 1.0 / t.lambda_b) * t.lambda_p;
    r["triple"] = {{"lambda_p_um", t.lambda_p},
                   {"lambda_a_um", t.lambda_a},
                   {"lambda_b_um", t.lambda_b},
                   {"omega_p", b.omega_a + b.omega_b},
                   {"omega_a", b.omega_a},
                   {"omega_b", b.omega_b},
                   {"polarization_p", to_string(t.pol_p)},
                   {"polarization_a", to_string(t.pol_a)},
                   {"polarization_b", to_string(t.pol_b)}};
    r["energy_conservation"] = {{"relative_defect", defect}, {"passed", defect <= 1e-6}};
    const double np = refractive_index(mp, t.lambda_p), na = refractive_index(ma, t.lambda_a),
                 nb = refractive_index(mb, t.lambda_b);
    const double gp = group_index(mp, t.lambda_p), ga = group_index(ma, t.lambda_a),
                 gb = group_index(mb, t.lambda_b);
    r["index"] = {{"p", np}, {"a", na}, {"b", nb}};
    r["group_index"] = {{"p", gp}, {"a", ga}, {"b", gb}};
    r["group_velocity_over_c"] = {{"p", 1.0 / gp}, {"a", 1.0 / ga}, {"b", 1.0 / gb}};
    const double L = poling_period(media, t);
    r["poling_period_um"] = number_or_null(L);
    r["phase_matched"] = std::isinf(L);

    const PhysicalSetup s = build_setup(media, t, b.length_m, b.tau_ps, b.epsilon, b.gamma);
    const GaussianConfig g = from_physical(s);
    r["slopes_ps"] = {{"s_p", g.s_p}, {"s_a", g.s_a}, {"s_b", g.s_b}};
    r["mismatch_ps"] = {{"eta_a", g.s_p - g.s_a}, {"eta_b", g.s_p - g.s_b}};
    r["reference_deltas"] = {{"index_p", np - ref.n_p},
                             {"index_a", na - ref.n_a},
                             {"index_b", nb - ref.n_b},
                             {"group_index_p", gp - ref.ng_p},
                             {"group_index_a", ga - ref.ng_a},
                             {"group_index_b", gb - ref.ng_b},
                             {"poling_period_um", number_or_null(L - ref.poling_um)}};
    return {{{run.output_path, dump(r)}}, 0};
}

CommandResult run_command(const std::string& name, const RunConfig& run) {
    if (name == "jsa") return cmd_jsa(run);
    if (name == "metrics") return cmd_metrics(run);
    if (name == "fc") return cmd_fc(run);
    if (name == "oracle") return cmd_oracle(run);
    if (name == "dispersion") return cmd_dispersion(run);
    throw ConfigError("unknown command '" + name + "'");
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) return 4;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const OutOfRange*>(&e) ||
        dynamic_cast<const BasisMismatch*>(&e))
        return 2;
    return 3;
}

std::string error_record(const std::exception& e) {
    json j;
    j["error"] = {{"type", error_type(e)}, {"message", e.what()}, {"exit_code", exit_code_for(e)}};
    return j.dump();
}

}  // namespace magnus::cli
