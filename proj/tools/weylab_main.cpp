// Command-line front end: runs scenario files (or the built-in battery)
// through the check runner and writes CSV/JSON reports.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or scenario parse
// error, 3 numerical domain error (singular metric, zero density, ...).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weylab/cli/runner.hpp"
#include "weylab/errors.hpp"

namespace {

struct OutputOptions {
    std::string out_dir;
    std::string format = "csv";
};

void emit(const weylab::RunResult& result, const std::string& id,
          const OutputOptions& out) {
    const bool csv = out.format == "csv" || out.format == "both";
    const bool js = out.format == "json" || out.format == "both";
    if (out.out_dir.empty()) {
        if (csv) std::cout << weylab::to_csv(result.records);
        if (js) std::cout << weylab::to_json(result.records);
        return;
    }
    std::filesystem::create_directories(out.out_dir);
    auto write = [&](const char* ext, const std::string& text) {
        std::ofstream f(std::filesystem::path(out.out_dir) / (id + ext));
        f << text;
    };
    if (csv) write(".csv", weylab::to_csv(result.records));
    if (js) write(".json", weylab::to_json(result.records));
}

int failures_to_exit_code(bool all_pass) { return all_pass ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weylab: numerical checks for projective Weyl-structure geometry"};
    app.require_subcommand(1);

    std::string scenario_path;
    weylab::RunOptions run_opts;
    OutputOptions out;
    double tol_scale = 1.0;
    int points = 0;
    unsigned seed = 0;
    bool have_seed = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--tol-scale", tol_scale, "scale all tolerances");
        cmd->add_option("--points", points, "override the sample-point count");
        cmd->add_option("--seed", seed, "override the sample seed")
            ->each([&](const std::string&) { have_seed = true; });
        cmd->add_option("--out", out.out_dir, "write reports into this directory");
        cmd->add_option("--format", out.format, "csv | json | both")
            ->check(CLI::IsMember({"csv", "json", "both"}));
    };

    CLI::App* run = app.add_subcommand("run", "run one scenario file");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    add_common(run);

    CLI::App* verify = app.add_subcommand("verify-all", "run the built-in battery");
    add_common(verify);

    CLI::App* listg = app.add_subcommand("list-geometries", "list catalog kinds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    run_opts.tol_scale = tol_scale;
    if (points > 0) run_opts.points = points;
    if (have_seed) run_opts.seed = seed;

    try {
        if (listg->parsed()) {
            for (const auto& k : weylab::catalog_kinds()) std::cout << k << "\n";
            return 0;
        }
        if (run->parsed()) {
            weylab::Scenario sc = weylab::load_scenario(scenario_path);
            weylab::RunResult result = weylab::run_scenario(sc, run_opts);
            emit(result, sc.id, out);
            return failures_to_exit_code(result.all_pass);
        }
        // verify-all
        bool all_pass = true;
        std::vector<weylab::ReportRecord> merged;
        for (const auto& sc : weylab::builtin_verification_scenarios()) {
            weylab::RunResult result = weylab::run_scenario(sc, run_opts);
            all_pass = all_pass && result.all_pass;
            merged.insert(merged.end(), result.records.begin(),
                          result.records.end());
        }
        weylab::RunResult combined;
        combined.records = std::move(merged);
        combined.all_pass = all_pass;
        emit(combined, "verify-all", out);
        return failures_to_exit_code(all_pass);
    } catch (const weylab::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const weylab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
