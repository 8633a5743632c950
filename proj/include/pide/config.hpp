#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pide/error.hpp"
#include "pide/scheme.hpp"

namespace pide {

/// Config rejection with the JSON pointer of the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string pointer, std::string kind, const std::string& message)
        : Error(Errc::config, kind + " at " + (pointer.empty() ? "/" : pointer) + ": " + message),
          pointer_(std::move(pointer)), kind_(std::move(kind)) {}

    /// "schema", "beta-out-of-range", "dimension".
    const std::string& kind() const noexcept { return kind_; }
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
    std::string kind_;
};

enum class Mode { cauchy, ergodic_vd, ergodic_lt, convergence, audit, reproduce };

std::string to_string(Mode mode);

using Function = std::function<double(const Point&)>;

/// Named analytic primitives:
///   number, "const:<c>", "cos1", "cos2", "cos2d", "shifted-cos", "bump", "zero",
///   {"const": c}, {"cos": {axis, amp, freq, phase}}, {"pos-sin": {axis, power, sign}},
///   {"sum": [...]}, {"product": [...]}, {"random-smooth": {modes, amp}}.
/// `dim` limits the axes that may be referenced; `seed` drives random-smooth.
Function parse_function(const nlohmann::json& spec, int dim, std::uint64_t seed, const std::string& pointer = "");

struct ExperimentConfig {
    explicit ExperimentConfig(const TorusGrid& grid) : problem(grid) {}

    nlohmann::json source;
    ProblemSpec problem;
    Mode mode = Mode::ergodic_vd;

    double T = 10.0;
    double window = 0.0;  // 0: max(1, T/8)
    std::vector<double> delta_schedule{0.2, 0.1, 0.05};
    double tol = 1e-9;
    std::size_t max_iter = 2'000'000;
    std::vector<double> snapshot_times;  // empty: 20 uniform times in (0, T] plus 0
    std::optional<GridField> u0;         // empty: zero
    std::string example_id;
    std::uint64_t seed = 0;
    std::string output_dir = "out";

    /// alpha = a2^{1/beta} per nonlocal term with a scaled jump (empty otherwise).
    std::vector<std::optional<Function>> jump_alpha;

    // audit mode
    std::vector<double> audit_betas;  // empty: betas of the nonlocal terms
    std::vector<double> audit_deltas{0.1, 0.01, 0.001};
};

/// Validated config, or ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config(const nlohmann::json& doc);

}  // namespace pide
