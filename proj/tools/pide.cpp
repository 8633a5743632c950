// pide: command-line front end for the periodic integro-differential solvers.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pide/catalog.hpp"
#include "pide/experiment.hpp"

namespace {

struct Flags {
    std::string output_dir;
    double tol = 0.0;
    long long seed = -1;
    bool quiet = false;
};

nlohmann::json load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw pide::ConfigError("", "schema", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw pide::ConfigError("", "schema", std::string("invalid JSON: ") + e.what());
    }
}

int run_config(const std::string& path, const std::set<pide::Mode>& allowed, const Flags& flags) {
    nlohmann::json doc = load(path);
    if (flags.seed >= 0) doc["seed"] = static_cast<std::uint64_t>(flags.seed);
    if (flags.tol > 0.0) doc["tol"] = flags.tol;
    if (!flags.output_dir.empty()) doc["output_dir"] = flags.output_dir;
    pide::ExperimentConfig cfg = pide::parse_config(doc);
    if (!allowed.count(cfg.mode)) {
        throw pide::ConfigError("/mode", "schema", "mode " + pide::to_string(cfg.mode) + " does not fit this subcommand");
    }
    const pide::ExperimentResult res = pide::run_experiment(cfg);
    if (!flags.quiet) {
        std::cout << res.summary.dump(2) << "\n";
        std::cout << "wrote " << res.files.size() << " files to " << cfg.output_dir << "\n";
    }
    return res.exit_code;
}

int run_reproduce(const std::string& id, const Flags& flags) {
    const std::string dir = flags.output_dir.empty() ? "out/" + id : flags.output_dir;
    const pide::ReproduceReport rep = pide::reproduce(id, dir);
    if (!flags.quiet) {
        std::printf("%-24s %-14s %-12s %-10s %s\n", "metric", "value", "expected", "tol", "result");
        for (const auto& r : rep.rows) {
            std::printf("%-24s %-14.6g %-12.6g %-10.3g %s\n", r.metric.c_str(), r.value, r.expected, r.tolerance,
                        r.pass ? "PASS" : "FAIL");
        }
        std::printf("%s: %s (outputs in %s)\n", rep.id.c_str(), rep.pass ? "PASS" : "FAIL", dir.c_str());
    }
    return rep.pass ? pide::exit_pass : pide::exit_tolerance_failure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic parabolic integro-differential solver: Cauchy runs, ergodic pairs, convergence, audits"};
    app.require_subcommand(1);
    Flags flags;
    app.add_option("--output-dir", flags.output_dir, "Directory for emitted files");
    app.add_option("--tol", flags.tol, "Solver tolerance override")->check(CLI::PositiveNumber);
    app.add_option("--seed", flags.seed, "Seed for randomized primitives")->check(CLI::NonNegativeNumber);
    app.add_flag("--quiet", flags.quiet, "Suppress console output");

    std::string config_path;
    std::string example_id;
    auto* cauchy = app.add_subcommand("solve-cauchy", "Forward Euler run with snapshots");
    auto* ergodic = app.add_subcommand("solve-ergodic", "Ergodic pair by vanishing discount or long time");
    auto* convergence = app.add_subcommand("convergence", "Distance to lambda t + v along a run");
    auto* audit = app.add_subcommand("audit", "Numeric assumption audits");
    for (auto* sub : {cauchy, ergodic, convergence, audit}) {
        sub->add_option("config", config_path, "JSON config")->required();
    }
    auto* repro = app.add_subcommand("reproduce", "Run a catalog entry and check its expected metrics");
    repro->add_option("example-id", example_id, "Catalog id")->required();
    auto* list = app.add_subcommand("list-examples", "Print the catalog");
    for (auto* sub : {cauchy, ergodic, convergence, audit, repro, list}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : pide::exit_config_error;
    }

    try {
        if (list->parsed()) {
            for (const auto& e : pide::example_catalog()) std::printf("%-18s %s\n", e.id.c_str(), e.description.c_str());
            return 0;
        }
        if (repro->parsed()) return run_reproduce(example_id, flags);
        if (cauchy->parsed()) return run_config(config_path, {pide::Mode::cauchy}, flags);
        if (ergodic->parsed()) return run_config(config_path, {pide::Mode::ergodic_vd, pide::Mode::ergodic_lt}, flags);
        if (convergence->parsed()) return run_config(config_path, {pide::Mode::convergence}, flags);
        if (audit->parsed()) return run_config(config_path, {pide::Mode::audit}, flags);
    } catch (const pide::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return pide::exit_config_error;
    } catch (const pide::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == pide::Errc::unknown_example ? pide::exit_config_error : pide::exit_solver_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pide::exit_solver_failure;
    }
    return pide::exit_solver_failure;
}
