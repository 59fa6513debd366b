#pragma once

// Scenario files: JSON descriptions of one experiment run. Schema:
//   {
//     "model":  {"fixture": "name"} | {"climate": {...}} | {"abstract": {...}},
//     "kind":   "strong" | "weak" | "check-formulas" | "simulate" | "validate",
//     "ladder": {"epsilons": [..], "replicas": int, ...},
//     "config": {"T":, "x0": [..], "delta":, "radius":, "substep_c":},
//     "seed":   int   (required: no wall-clock seeding)
//   }
// `delta` is the macro/output step (0 or absent -> per-eps default eps^(4/3)).
// run() writes report.json, report.csv and summary.txt into the output
// directory and returns 0 (all pass) / 2 (inconclusive) / 1 (failure).

#include "slowfast/diagnostics.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slowfast {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Scenario {
    std::string kind;
    Fixture fixture;
    EpsLadder ladder;
    ExperimentConfig cfg;
    std::uint64_t seed = 0;
    std::string resolved; // full resolved config, pretty JSON, embedded in reports
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

// dotted-path override, e.g. "config.T=2" or "ladder.replicas=100";
// the value is parsed as JSON when possible, kept as a string otherwise
void apply_override(nlohmann::json& doc, const std::string& spec);

struct RunResult {
    int exit_code = 0;
    Report report;
};

RunResult run(const Scenario& scenario, const std::string& out_dir, int threads);

} // namespace slowfast
