#include "slowfast/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw slowfast::ScenarioError("scenario: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

slowfast::Scenario load_with_overrides(const std::string& path,
                                       const std::vector<std::string>& overrides) {
    std::string text = read_file(path);
    if (!overrides.empty()) {
        nlohmann::json doc = nlohmann::json::parse(text);
        for (const auto& ov : overrides) slowfast::apply_override(doc, ov);
        text = doc.dump();
    }
    return slowfast::parse_scenario(text);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"slow-fast model reduction: simulation and convergence diagnostics"};
    app.require_subcommand(1);
    app.fallthrough(); // accept --out/--threads/--override after the subcommand

    std::string out_dir = "out";
    int threads = 1;
    std::vector<std::string> overrides;
    app.add_option("--out", out_dir, "output directory for reports and tables");
    app.add_option("--threads", threads, "worker threads for Monte Carlo replicas")
        ->check(CLI::PositiveNumber);
    app.add_option("--override", overrides,
                   "scenario override, e.g. config.T=2 or ladder.replicas=100")
        ->take_all();

    std::string validate_file, run_file;
    CLI::App* cmd_validate =
        app.add_subcommand("validate", "parse a scenario file and run all eager validators");
    cmd_validate->add_option("file", validate_file, "scenario JSON file")->required();
    CLI::App* cmd_run = app.add_subcommand("run", "run a scenario and write reports");
    cmd_run->add_option("file", run_file, "scenario JSON file")->required();
    CLI::App* cmd_fixtures = app.add_subcommand("fixtures", "list built-in models");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_fixtures->parsed()) {
            for (const auto& name : slowfast::fixture_names()) std::cout << name << '\n';
            return 0;
        }
        if (cmd_validate->parsed()) {
            slowfast::Scenario sc = load_with_overrides(validate_file, overrides);
            std::cout << "scenario OK: kind=" << sc.kind << " model=" << sc.fixture.name
                      << " seed=" << sc.seed << '\n';
            return 0;
        }
        slowfast::Scenario sc = load_with_overrides(run_file, overrides);
        slowfast::RunResult result = slowfast::run(sc, out_dir, threads);
        for (const auto& row : result.report)
            std::cout << '[' << row.verdict << "] " << row.name
                      << (row.epsilon ? " eps=" + std::to_string(*row.epsilon) : "")
                      << " estimate=" << row.estimate << " se=" << row.se << '\n';
        std::cout << "reports written to " << out_dir << " (exit " << result.exit_code
                  << ")\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
