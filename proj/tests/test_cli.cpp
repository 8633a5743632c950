#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "pide/catalog.hpp"
#include "pide/config.hpp"
#include "pide/error.hpp"
#include "pide/experiment.hpp"
#include "support.hpp"

using namespace pide;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kHeat = R"({"grid": {"d1": 1, "d2": 0, "n": 64}, "local": [{"block": "x1", "a": 1}],
                        "f": "cos1", "mode": "ergodic-vd", "delta_schedule": [0.2, 0.1, 0.05]})";

ConfigError config_error(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("config accepted");
    return ConfigError("", "", "");
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pide_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PIDE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("parse_config accepts the minimal heat config") {
    const ExperimentConfig cfg = parse_config(std::string(kHeat));
    CHECK(cfg.mode == Mode::ergodic_vd);
    CHECK(cfg.problem.grid.n() == 64);
    CHECK(cfg.problem.local_terms.size() == 1);
    CHECK(cfg.delta_schedule == std::vector<double>{0.2, 0.1, 0.05});
    CHECK(cfg.problem.f[0] == doctest::Approx(1.0));
    CHECK(cfg.snapshot_times.front() == 0.0);
    CHECK(cfg.snapshot_times.back() == cfg.T);
}

TEST_CASE("parse_config rejections carry a pointer and a kind") {
    json doc = json::parse(kHeat);
    doc["nonlocal"] = json::array({{{"block", "x1"}, {"beta", 0.8}}});
    ConfigError e = config_error(doc);
    CHECK(e.kind() == "beta-out-of-range");
    CHECK(e.pointer() == "/nonlocal/0/beta");

    doc = json::parse(kHeat);
    doc.erase("f");
    e = config_error(doc);
    CHECK(e.kind() == "schema");
    CHECK(e.pointer() == "/f");

    doc = json::parse(kHeat);
    doc["colour"] = "blue";
    CHECK(config_error(doc).pointer() == "/colour");

    doc = json::parse(kHeat);
    doc["local"][0]["block"] = "x2";
    CHECK(config_error(doc).kind() == "dimension");

    doc = json::parse(kHeat);
    doc["grid"]["n"] = 48;
    CHECK(config_error(doc).kind() == "dimension");

    doc = json::parse(kHeat);
    doc["local"][0]["a"] = 0;
    CHECK(config_error(doc).kind() == "degenerate");

    doc = json::parse(kHeat);
    doc["delta_schedule"] = {0.1, 0.2, 0.05};
    CHECK(config_error(doc).pointer() == "/delta_schedule/1");

    CHECK_THROWS_AS(parse_config(std::string("{not json")), ConfigError);
}

TEST_CASE("function primitives") {
    const Point x{0.25, 0.5};
    CHECK(parse_function(json("cos1"), 2, 0)(x) == doctest::Approx(0.0).scale(1));
    CHECK(parse_function(json("cos2"), 2, 0)(x) == doctest::Approx(-1.0));
    CHECK(parse_function(json("cos2d"), 2, 0)({0.0, 0.5}) == doctest::Approx(-1.0));
    CHECK(parse_function(json("const:2.5"), 1, 0)(x) == 2.5);
    CHECK(parse_function(json(3), 1, 0)(x) == 3.0);
    CHECK(parse_function(json("zero"), 1, 0)(x) == 0.0);
    CHECK(parse_function(json::parse(R"({"sum": ["cos1", 1]})"), 1, 0)({0.0, 0.0}) == doctest::Approx(2.0));
    CHECK(parse_function(json::parse(R"({"product": [2, "cos1"]})"), 1, 0)({0.5, 0.0}) == doctest::Approx(-2.0));
    CHECK(parse_function(json::parse(R"({"cos": {"axis": 0, "amp": 0.5, "freq": 2}})"), 1, 0)({0.25, 0.0}) == doctest::Approx(-0.5));
    CHECK(parse_function(json::parse(R"({"pos-sin": {"axis": 0, "power": 2, "sign": -1}})"), 1, 0)({0.25, 0.0}) == 0.0);
    CHECK(parse_function(json::parse(R"({"pos-sin": {"axis": 0, "power": 2, "sign": -1}})"), 1, 0)({0.75, 0.0}) == doctest::Approx(1.0));
    const Function r1 = parse_function(json::parse(R"({"random-smooth": {"modes": 3, "amp": 1}})"), 2, 7);
    const Function r2 = parse_function(json::parse(R"({"random-smooth": {"modes": 3, "amp": 1}})"), 2, 7);
    CHECK(r1(x) == r2(x));
    CHECK_THROWS_AS(parse_function(json("cos2"), 1, 0), ConfigError);
    CHECK_THROWS_AS(parse_function(json("nope"), 1, 0), ConfigError);
}

TEST_CASE("catalog entries are unique, parse, and pass their audits") {
    std::set<std::string> ids;
    for (const auto& e : example_catalog()) {
        CAPTURE(e.id);
        CHECK(ids.insert(e.id).second);
        CHECK_FALSE(e.expected.empty());
        const ExperimentConfig cfg = parse_config(e.config);
        CHECK(validate(cfg.problem) > 0.0);
        for (const auto& r : run_audits(cfg)) {
            CAPTURE(r.assumption);
            CHECK(r.pass);
        }
    }
    for (const char* id : {"toy-mixed", "fractional-drift", "superlinear", "composed", "mixed-gradients", "sub-vs-super"}) {
        CHECK(ids.count(id) == 1);
    }
    try {
        find_example("unknown-id");
        FAIL("expected unknown_example");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_example);
    }
}

TEST_CASE("run_experiment: ergodic-vd heat config") {
    const fs::path dir = scratch("heat");
    json doc = json::parse(kHeat);
    doc["output_dir"] = dir.string();
    const ExperimentResult res = run_experiment(parse_config(doc));
    CHECK(res.exit_code == exit_pass);
    CHECK(std::abs(res.summary.at("lambda").get<double>()) < 1e-8);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "ergodic_pair.json"));
    CHECK(fs::exists(dir / "v.csv"));
    const json manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("version") == kLibraryVersion);
    CHECK(manifest.contains("wall_time_s"));
    CHECK(manifest.at("config") == doc);
    fs::remove_all(dir);
}

TEST_CASE("run_experiment: audit mode") {
    const fs::path dir = scratch("audit");
    json doc = json::parse(kHeat);
    doc["mode"] = "audit";
    doc["H_exponent"] = 2;
    doc["audit"] = {{"betas", {1.1, 1.5, 1.9}}};
    doc["output_dir"] = dir.string();
    const ExperimentResult res = run_experiment(parse_config(doc));
    CHECK(res.exit_code == exit_pass);
    bool saw_hb = false;
    for (const auto& a : res.summary.at("audits")) {
        if (a.at("assumption") == "H-b") {
            saw_hb = true;
            CHECK(a.at("pass") == true);
        }
    }
    CHECK(saw_hb);
    CHECK(res.summary.at("audits_failed") == 0);

    doc["H_exponent"] = 1;
    doc["gradient"] = {{{"block", "full"}, {"b", 1}, {"k", 1}}};
    const ExperimentResult linear = run_experiment(parse_config(doc));
    CHECK(linear.exit_code == exit_pass);
    fs::remove_all(dir);
}

TEST_CASE("property: identical config and seed give identical outputs") {
    json doc = json::parse(R"({"grid": {"d1": 1, "d2": 1, "n": 16},
                               "local": [{"block": "x1", "a": 1}],
                               "nonlocal": [{"block": "x2", "beta": 1.5, "discretization": "quadrature"}],
                               "gradient": [{"block": "full", "b": 1, "k": 2}],
                               "f": {"sum": ["cos1", {"noise": {"amp": 0.1}}]},
                               "u0": {"random-smooth": {"modes": 3, "amp": 0.5}},
                               "mode": "cauchy", "T": 0.1, "seed": 9})");
    std::vector<fs::path> dirs{scratch("det_a"), scratch("det_b")};
    std::vector<ExperimentResult> results;
    for (const auto& d : dirs) {
        doc["output_dir"] = d.string();
        results.push_back(run_experiment(parse_config(doc)));
    }
    REQUIRE(results[0].files == results[1].files);
    for (const auto& f : results[0].files) {
        if (f == "manifest.json") continue;
        CAPTURE(f);
        CHECK(slurp(dirs[0] / f) == slurp(dirs[1] / f));
    }
    for (const auto& d : dirs) fs::remove_all(d);
}

TEST_CASE("command-line exit codes") {
    CHECK(run_cli("list-examples") == 0);
    CHECK(run_cli("reproduce unknown-id") == 2);
    CHECK(run_cli("solve-cauchy /nonexistent/config.json") == 2);
    CHECK(run_cli("") == 2);

    const fs::path dir = scratch("cli");
    fs::create_directories(dir);
    json doc = json::parse(kHeat);
    doc["nonlocal"] = json::array({{{"block", "x1"}, {"beta", 0.8}}});
    std::ofstream(dir / "bad.json") << doc.dump();
    CHECK(run_cli("solve-ergodic " + (dir / "bad.json").string()) == 2);

    std::ofstream(dir / "heat.json") << kHeat;
    CHECK(run_cli("--quiet --output-dir " + (dir / "out").string() + " solve-ergodic " + (dir / "heat.json").string()) == 0);
    CHECK(fs::exists(dir / "out" / "manifest.json"));
    // The mode must match the subcommand.
    CHECK(run_cli("solve-cauchy " + (dir / "heat.json").string()) == 2);
    fs::remove_all(dir);
}
