#pragma once

#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "pide/scheme.hpp"

namespace pide {

struct CauchyOptions {
    double safety = 0.9;
    /// Steps between recomputations of the Lipschitz-dependent CFL step.
    int lipschitz_refresh = 16;
    /// Positive: use this step throughout (must satisfy the CFL bound at every refresh).
    double fixed_dt = 0.0;
};

struct Snapshot {
    double t;
    GridField u;
};

struct CauchyRun {
    ProblemSpec problem;
    GridField u0;
    double T = 0.0;
    std::vector<double> snapshot_times;
    std::vector<Snapshot> snapshots;
    /// (t, slope): mean(u(t_k) - u(t_{k-1})) / (t_k - t_{k-1}); the first entry is the
    /// instantaneous mean du/dt.
    std::vector<std::pair<double, double>> slope_series;
    std::size_t steps = 0;
};

/// u - dt * op(u). Throws Errc::cfl_violation if dt exceeds the unit-safety CFL step,
/// Errc::non_finite if the update is not finite.
GridField step_explicit(const GridField& u, const ProblemSpec& problem, double dt);
GridField step_explicit(const GridField& u, const SpatialOperator& op, double dt);

/// Forward Euler up to T with snapshots linearly interpolated to `snapshot_times`
/// (increasing, within [0, T]; empty means {T}).
CauchyRun solve_cauchy(const GridField& u0, const ProblemSpec& problem, double T,
                       std::vector<double> snapshot_times, const CauchyOptions& options = {});
CauchyRun solve_cauchy(const GridField& u0, const SpatialOperator& op, double T,
                       std::vector<double> snapshot_times, const CauchyOptions& options = {});

/// `t,sup_norm,mean,slope,lipschitz` per snapshot.
void write_trajectory_csv(const CauchyRun& run, std::ostream& os);

/// One torus CSV per snapshot, `<prefix>_<k>.csv`. Returns the paths written.
std::vector<std::filesystem::path> write_snapshots(const CauchyRun& run, const std::filesystem::path& dir,
                                                   const std::string& prefix = "u");

}  // namespace pide
