#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace gapbench {

struct ExperimentResult {
    nlohmann::json report;
    bool pass = false;
};

std::vector<std::string> experiment_kinds();
std::string describe_kind(const std::string& kind);

// Validates and executes a config; throws std::invalid_argument with every
// violated precondition listed when validation fails.
ExperimentResult run_experiment(const nlohmann::json& config);

// report.json plus curve_<alg>.csv / plotdata_<alg>.csv next to it.
void write_report_files(const nlohmann::json& report, const std::string& out_dir);

// Re-validates a report's certificates against its embedded curve data.
// Returns {"ok": bool, "problems": [...]}.
nlohmann::json recheck_report(const nlohmann::json& report);

}  // namespace gapbench
