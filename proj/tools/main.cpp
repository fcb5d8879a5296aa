#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "commands.hpp"
#include "magnus/errors.hpp"

namespace {

using namespace magnus;

struct Args {
    std::string config;
    std::optional<int> grid;
    std::optional<double> span;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::string command;  // verify only
};

void add_common(CLI::App* sub, Args& a) {
    sub->add_option("--config", a.config, "run configuration (JSON)")->required();
    sub->add_option("--grid", a.grid, "grid points per axis");
    sub->add_option("--span", a.span, "grid half-width in J1 widths");
    sub->add_option("--out", a.out, "output path (default: standard output)");
    sub->add_option("--format", a.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

RunConfig load(const Args& a) { return load_run_config(a.config, Overrides{a.grid, a.span, a.out, a.format}); }

void write_artifacts(const cli::CommandResult& r) {
    for (const auto& art : r.artifacts) {
        if (art.path.empty()) {
            std::cout << art.content << std::flush;
            continue;
        }
        std::ofstream f(art.path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + art.path);
        f << art.content;
        if (!f) throw IoError("failed writing " + art.path);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

// Regenerates the artifacts and compares them byte for byte with the files on disk.
int verify(const Args& a) {
    const RunConfig run = load(a);
    if (run.output_path.empty()) throw ConfigError("verify needs --out or output.path");
    const cli::CommandResult r = cli::run_command(a.command, run);
    const std::string hash = config_hash(run);
    nlohmann::json rep;
    rep["config_hash"] = hash;
    bool ok = true;
    for (const auto& art : r.artifacts) {
        const std::string disk = read_file(art.path);
        const bool hash_ok = disk.find(hash) != std::string::npos;
        const bool same = disk == art.content;
        rep["files"].push_back({{"path", art.path}, {"hash_matches", hash_ok}, {"identical", same}});
        ok = ok && hash_ok && same;
    }
    rep["verified"] = ok;
    std::cout << rep.dump() << "\n";
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Magnus-expansion biphoton calculator"};
    app.set_version_flag("--version", cli::kToolVersion);
    app.require_subcommand(1);
    Args args;
    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (const char* name : {"jsa", "metrics", "fc", "oracle", "dispersion"}) {
        auto* s = app.add_subcommand(name, std::string("run the ") + name + " command");
        add_common(s, args);
        subs.emplace_back(name, s);
    }
    auto* ver = app.add_subcommand("verify", "recompute outputs and compare with files on disk");
    add_common(ver, args);
    ver->add_option("--command", args.command, "command that produced the files")
        ->required()
        ->check(CLI::IsMember({"jsa", "metrics", "fc", "oracle", "dispersion"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const ConfigError err(e.what());
        std::cerr << cli::error_record(err) << "\n";
        return 2;
    }

    try {
        if (ver->parsed()) return verify(args);
        for (const auto& [name, s] : subs) {
            if (!s->parsed()) continue;
            const cli::CommandResult r = cli::run_command(name, load(args));
            write_artifacts(r);
            return r.exit_code;
        }
    } catch (const std::exception& e) {
        std::cerr << cli::error_record(e) << "\n";
        return cli::exit_code_for(e);
    }
    return 0;
}
