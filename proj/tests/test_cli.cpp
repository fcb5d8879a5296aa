#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "commands.hpp"
#include "magnus/errors.hpp"
#include "magnus/runconfig.hpp"

using namespace magnus;
using nlohmann::json;

namespace {

const std::string kSource = MAGNUS_SOURCE_DIR;
const std::string kTool = MAGNUS_CLI_PATH;

std::string example(const std::string& name) { return kSource + "/docs/examples/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string temp(const std::string& name) { return ::testing::TempDir() + "magnus_cli_" + name; }

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

int run_tool(const std::string& args, const std::string& stderr_path = "/dev/null") {
    const std::string cmd = kTool + " " + args + " >/dev/null 2>" + stderr_path;
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct CsvGrid {
    std::string comment, header;
    std::vector<std::vector<double>> rows;
};

CsvGrid parse_csv(const std::string& text) {
    CsvGrid g;
    std::istringstream in(text);
    std::getline(in, g.comment);
    std::getline(in, g.header);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        g.rows.push_back(row);
    }
    return g;
}

// Enough of JSON Schema for the bundled schema: type (with unions), enum, pattern-free required/properties.
bool type_ok(const json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    return false;
}

void validate(const json& v, const json& schema, const std::string& where) {
    if (schema.contains("type")) {
        bool ok = false;
        if (schema["type"].is_array()) {
            for (const auto& t : schema["type"]) ok = ok || type_ok(v, t.get<std::string>());
        } else {
            ok = type_ok(v, schema["type"].get<std::string>());
        }
        EXPECT_TRUE(ok) << where << " has the wrong type";
        if (!ok) return;
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& e : schema["enum"]) found = found || e == v;
        EXPECT_TRUE(found) << where << " not in enum";
    }
    if (!v.is_object()) return;
    if (schema.contains("required"))
        for (const auto& r : schema["required"]) EXPECT_TRUE(v.contains(r.get<std::string>())) << where << "." << r;
    if (schema.contains("properties"))
        for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it)
            if (v.contains(it.key())) validate(v[it.key()], it.value(), where + "." + it.key());
}

}  // namespace

TEST(RunConfig, ParseAndValidate) {
    const RunConfig r = load_run_config(example("separable.json"));
    ASSERT_TRUE(r.gaussian.has_value());
    EXPECT_DOUBLE_EQ(r.gaussian->s_p - r.gaussian->s_a, 1.0);
    EXPECT_EQ(r.grid.points, 65);

    EXPECT_THROW(parse_run_config("{}"), ConfigError);
    EXPECT_THROW(parse_run_config("not json"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"gaussian":{"tau":1,"epsilon":0.1,"eta_a":1,"eta_b":-1},
        "physical":{"length_m":0.04,"tau_ps":1,"epsilon":0.3,"omega_a":1.2707,"omega_b":0.7293}})"),
                 ConfigError);
    EXPECT_THROW(parse_run_config(R"({"gaussian":{"tau":1,"epsilon":0.1,"eta_a":1,"eta_b":-1},"grid":{"points":1}})"),
                 ConfigError);
    EXPECT_THROW(parse_run_config(R"({"gaussian":{"tau":1,"epsilon":0.1,"eta_a":1,"eta_b":-1,"colour":2}})"),
                 ConfigError);
    EXPECT_THROW(parse_run_config(R"({"gaussian":{"tau":1,"epsilon":0.1,"s_p":1,"s_a":0,"s_b":1}})"), ConfigError);
    EXPECT_THROW(load_run_config("/nonexistent/run.json"), IoError);
}

TEST(RunConfig, HashCoversPhysicsNotOutput) {
    const std::string text = slurp(example("separable.json"));
    const RunConfig a = parse_run_config(text);
    const RunConfig b = parse_run_config(text, Overrides{{}, {}, std::string("x.csv"), std::string("json")});
    const RunConfig c = parse_run_config(text, Overrides{33, {}, {}, {}});
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_NE(config_hash(a), config_hash(c));
    EXPECT_EQ(config_hash(a).size(), 16u);
    EXPECT_EQ(c.grid.points, 33);
}

TEST(CmdJsa, ReferenceCrystalGrid) {
    const RunConfig r = load_run_config(example("ppln.json"));
    const auto res = cli::cmd_jsa(r);
    ASSERT_EQ(res.artifacts.size(), 1u);
    const CsvGrid g = parse_csv(res.artifacts[0].content);
    EXPECT_EQ(g.comment, "# magnus jsa config_hash=" + config_hash(r));
    EXPECT_EQ(g.header, "d_omega_a,d_omega_b,j1_norm,j3_norm,k3_norm");
    ASSERT_EQ(g.rows.size(), 129u * 129u);
    double peak = 0;
    for (const auto& row : g.rows) {
        ASSERT_EQ(row.size(), 5u);
        for (double x : row) ASSERT_TRUE(std::isfinite(x));
        peak = std::max(peak, std::abs(row[2]));
    }
    EXPECT_NEAR(peak, 1 / std::sqrt(std::numbers::pi), 1e-9);
}

TEST(CmdJsa, EqualMismatchesGiveNoThirdOrder) {
    const RunConfig r = parse_run_config(
        R"({"gaussian":{"tau":1,"epsilon":0.2,"eta_a":0.6,"eta_b":0.6},"grid":{"points":41}})");
    const CsvGrid g = parse_csv(cli::cmd_jsa(r).artifacts[0].content);
    for (const auto& row : g.rows) {
        EXPECT_LT(std::abs(row[3]), 1e-12);
        EXPECT_LT(std::abs(row[4]), 1e-12);
    }
}

TEST(CmdJsa, DeterministicFilesAndVerify) {
    const std::string out = temp("jsa.csv");
    const std::string args = "jsa --config " + example("separable.json") + " --grid 33 --out " + out;
    ASSERT_EQ(run_tool(args), 0);
    const std::string first = slurp(out), side = slurp(out + ".json");
    ASSERT_EQ(run_tool(args), 0);
    EXPECT_EQ(slurp(out), first);
    EXPECT_EQ(slurp(out + ".json"), side);
    const json s = json::parse(side);
    EXPECT_EQ(s["command"], "jsa");
    EXPECT_EQ(s["config_hash"].get<std::string>().size(), 16u);

    EXPECT_EQ(run_tool("verify --command jsa --config " + example("separable.json") + " --grid 33 --out " + out), 0);
    write(out, first + "0,0,0,0,0\n");
    EXPECT_EQ(run_tool("verify --command jsa --config " + example("separable.json") + " --grid 33 --out " + out), 3);
}

TEST(CmdJsa, JsonFormat) {
    const RunConfig r = load_run_config(example("separable.json"), Overrides{9, {}, {}, std::string("json")});
    const json j = json::parse(cli::cmd_jsa(r).artifacts[0].content);
    EXPECT_EQ(j["grid"].size(), 9u);
    EXPECT_EQ(j["j1_norm"].size(), 9u);
    EXPECT_NEAR(j["j1_norm"][4][4].get<double>(), -1 / std::sqrt(std::numbers::pi), 1e-15);
}

TEST(CmdMetrics, SchemaAndValues) {
    const json schema = json::parse(slurp(kSource + "/docs/schemas/metrics.schema.json"));
    const json sep = json::parse(cli::cmd_metrics(load_run_config(example("separable.json"))).artifacts[0].content);
    validate(sep, schema, "report");
    EXPECT_DOUBLE_EQ(sep["schmidt_analytic"].get<double>(), 1.0);
    EXPECT_NEAR(sep["schmidt_numeric"].get<double>(), 1.0, 1e-6);
    EXPECT_NEAR(sep["tau2_over_r2"].get<double>(), 0.25, 1e-15);
    EXPECT_TRUE(sep["copropagation"].is_null());

    const json pp = json::parse(cli::cmd_metrics(load_run_config(example("ppln.json"))).artifacts[0].content);
    validate(pp, schema, "report");
    // Computed group indices give 0.353 for the crystal proposal.
    EXPECT_NEAR(pp["fom_r_bound"].get<double>(), 0.353, 2e-3);
    EXPECT_LE(pp["fom_r_measured"].get<double>(), pp["fom_r_bound"].get<double>());
    EXPECT_FALSE(pp["copropagation"]["infinite_walkoff_a"].get<bool>());
}

TEST(CmdFc, Targets) {
    const std::string base =
        R"({"gaussian":{"tau":1,"epsilon":0.1,"eta_a":1,"eta_b":-1,"process":"FC"},"fc":{"target":"solve_eps","n":%d}})";
    char buf[256];
    std::snprintf(buf, sizeof buf, base.c_str(), 0);
    const json s0 = json::parse(cli::cmd_fc(parse_run_config(buf)).artifacts[0].content);
    EXPECT_NEAR(s0["epsilon"].get<double>(), 0.5, 1e-14);
    EXPECT_NEAR(s0["efficiency"].get<double>(), 1.0, 1e-12);
    std::snprintf(buf, sizeof buf, base.c_str(), 1);
    EXPECT_THROW(cli::cmd_fc(parse_run_config(buf)), DegenerateModel);
    const std::string cfg = temp("fc1.json");
    write(cfg, buf);
    const std::string err = temp("fc1.err");
    EXPECT_EQ(run_tool("fc --config " + cfg, err), 3);
    const json rec = json::parse(slurp(err));
    EXPECT_EQ(rec["error"]["type"], "DegenerateModel");

    RunConfig c = load_run_config(example("fc_modes.json"));
    c.fc.target = "coupling";
    const json g = json::parse(cli::cmd_fc(c).artifacts[0].content);
    for (std::size_t j = 1; j + 1 < g["g"].size(); ++j)
        EXPECT_NEAR(g["g"][j].get<double>() / g["g"][j + 1].get<double>(),
                    g["g"][0].get<double>() / g["g"][1].get<double>(), 1e-12);

    EXPECT_THROW(cli::cmd_fc(load_run_config(example("separable.json"))), ConfigError);
}

TEST(CmdFc, ModesCsvIsOrthonormal) {
    const auto res = cli::cmd_fc(load_run_config(example("fc_modes.json")));
    EXPECT_EQ(res.exit_code, 0);
    const CsvGrid g = parse_csv(res.artifacts[0].content);
    ASSERT_EQ(g.rows.size(), 1001u);
    const double ha = g.rows[1][1] - g.rows[0][1], hb = g.rows[1][2] - g.rows[0][2];
    for (int side = 0; side < 2; ++side)
        for (int j = 0; j <= 8; ++j)
            for (int k = 0; k <= 8; ++k) {
                double s = 0;
                for (const auto& r : g.rows) s += r[3 + 9 * side + j] * r[3 + 9 * side + k];
                EXPECT_NEAR(s * (side == 0 ? ha : hb), j == k ? 1.0 : 0.0, 1e-6);
            }
}

TEST(CmdOracle, Propagator) {
    const json r = json::parse(cli::cmd_oracle(load_run_config(example("propagator.json"))).artifacts[0].content);
    EXPECT_EQ(r["basis"]["dimension"], 478);
    const auto& rows = r["eps_list"];
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_GE(rows[i]["ratio_full"].get<double>(), 10.0);
        EXPECT_LE(rows[i]["ratio_full"].get<double>(), 22.0);
    }
    RunConfig z = load_run_config(example("propagator.json"));
    z.oracle.eps_list = {0.0};
    const json r0 = json::parse(cli::cmd_oracle(z).artifacts[0].content);
    EXPECT_EQ(r0["eps_list"][0]["distance_full"].get<double>(), 0.0);
}

TEST(CmdOracle, QuadratureAtCenter) {
    RunConfig q = load_run_config(example("quadrature.json"));
    q.oracle.points = {{0.0, 0.0}};
    const auto res = cli::cmd_oracle(q);
    EXPECT_EQ(res.exit_code, 0);
    const json r = json::parse(res.artifacts[0].content);
    EXPECT_LT(r["points"][0]["rel_deviation"].get<double>(), 1e-4);
}

TEST(CmdDispersion, ReferenceCrystal) {
    const json r = json::parse(cli::cmd_dispersion(load_run_config(example("ppln.json"))).artifacts[0].content);
    EXPECT_NEAR(r["poling_period_um"].get<double>(), 58.25, 0.05);
    EXPECT_TRUE(r["energy_conservation"]["passed"].get<bool>());
    for (const char* k : {"index_p", "index_a", "index_b"})
        EXPECT_LT(std::abs(r["reference_deltas"][k].get<double>()), 5e-5) << k;
    EXPECT_THROW(cli::cmd_dispersion(load_run_config(example("separable.json"))), ConfigError);

    const std::string cfg = temp("far.json");
    write(cfg, R"({"physical":{"length_m":0.04,"tau_ps":1,"epsilon":0.3,"omega_a":6.0,"omega_b":0.7293}})");
    const std::string err = temp("far.err");
    EXPECT_EQ(run_tool("dispersion --config " + cfg, err), 2);
    EXPECT_EQ(json::parse(slurp(err))["error"]["type"], "OutOfRange");
}

TEST(Tool, ExitCodes) {
    EXPECT_EQ(run_tool("--version"), 0);
    EXPECT_EQ(run_tool("jsa"), 2);
    EXPECT_EQ(run_tool("jsa --config /nonexistent/cfg.json"), 4);
    const std::string bad = temp("bad.json");
    write(bad, R"({"gaussian":{"tau":-1,"epsilon":0.1,"eta_a":1,"eta_b":-1}})");
    EXPECT_EQ(run_tool("metrics --config " + bad), 2);
    EXPECT_EQ(run_tool("jsa --config " + example("separable.json") + " --out /nonexistent/dir/x.csv"), 4);
    EXPECT_EQ(run_tool("jsa --config " + example("separable.json") + " --format xml"), 2);
}
