#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pide/audit.hpp"
#include "pide/config.hpp"

namespace pide {

inline constexpr const char* kLibraryVersion = "0.1.0";

enum ExitCode : int { exit_pass = 0, exit_solver_failure = 1, exit_config_error = 2, exit_tolerance_failure = 3 };

struct ExperimentResult {
    int exit_code = exit_pass;
    nlohmann::json summary;
    std::vector<std::string> files;  // relative to the output directory
};

/// Assumption audits implied by a config: M1/M2 per beta, jump Lipschitz per scaled
/// jump, and H-a (m <= 1) or H-b and propH (m > 1) for the Hamiltonian exponent.
std::vector<AuditReport> run_audits(const ExperimentConfig& config);

/// Dispatches on the config mode and writes manifest.json plus mode-specific files
/// into config.output_dir. Solver errors propagate as exceptions.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct ReproduceRow {
    std::string metric;
    double value;
    double expected;
    double tolerance;
    std::string basis;
    bool pass;
};

struct ReproduceReport {
    std::string id;
    nlohmann::json metrics;
    std::vector<ReproduceRow> rows;
    bool pass = false;
};

/// Runs a catalog entry, compares its expected metrics, writes reproduce.csv.
/// Throws Errc::unknown_example.
ReproduceReport reproduce(const std::string& example_id, const std::string& output_dir);

}  // namespace pide
